#include "ptile/holes.hpp"

#include <algorithm>
#include <bit>
#include <set>

#include "ptile/error.hpp"
#include "ptile/rng.hpp"

namespace ptile {

using nlohmann::json;

namespace {

void check_arena(const PartiteGraph& g, const std::vector<int>& parts)
{
    std::set<int> distinct(parts.begin(), parts.end());
    if (distinct.size() != parts.size() || parts.size() < 2)
        throw Error("invalid hole arena");
    for (int p : parts)
        if (p < 0 || p >= g.k())
            throw Error("invalid hole arena");
    if (!g.pattern().is_clique(parts))
        throw Error("invalid hole arena");
}

// Depth-first search for a K_r with the j-th vertex in cand[j].
bool clique_in(const PartiteGraph& g, const std::vector<int>& parts, std::vector<Bits> cand, std::size_t j)
{
    if (j == parts.size())
        return true;
    for (auto a = cand[j].find_first(); a != Bits::npos; a = cand[j].find_next(a)) {
        VertexId v{parts[j], static_cast<int>(a)};
        std::vector<Bits> next = cand;
        bool dead = false;
        for (std::size_t q = j + 1; q < parts.size(); ++q) {
            next[q] &= g.neighbors(v, parts[q]);
            dead = dead || next[q].none();
        }
        if (!dead && clique_in(g, parts, std::move(next), j + 1))
            return true;
    }
    return false;
}

class ExactHoleSearch {
public:
    ExactHoleSearch(const PartiteGraph& g, const std::vector<int>& parts, int s, std::uint64_t* explored)
        : g_(g), parts_(parts), r_(static_cast<int>(parts.size())), s_(s), explored_(explored),
          chosen_(parts.size(), Bits(static_cast<std::size_t>(g.n()))), levels_(parts.size()),
          bad_(static_cast<std::size_t>(g.n()))
    {
        // The empty clique sees every vertex of every later part.
        Clique base;
        for (int q = 0; q < r_; ++q)
            base.cn.push_back(full_bits(static_cast<std::size_t>(g.n())));
        root_.push_back(std::move(base));
    }

    std::optional<HoleCertificate> run()
    {
        if (s_ > g_.n())
            return std::nullopt;
        if (!rec(0, 0, 0))
            return std::nullopt;
        HoleCertificate c;
        c.r = r_;
        c.parts = parts_;
        c.sets = chosen_;
        c.s = s_;
        c.verified = true;
        return c;
    }

private:
    struct Clique {
        std::vector<Bits> cn; // indexed by tuple position; only later positions are meaningful
    };

    const std::vector<Clique>& prev_level(int j) const { return j == 0 ? root_ : levels_[static_cast<std::size_t>(j - 1)]; }

    bool rec(int j, int start, int count)
    {
        const int last = r_ - 1;
        if (j == last) {
            Bits good = ~bad_;
            if (static_cast<int>(good.count()) < s_)
                return false;
            Bits pick(static_cast<std::size_t>(g_.n()));
            std::size_t a = good.find_first();
            for (int t = 0; t < s_; ++t, a = good.find_next(a))
                pick.set(a);
            chosen_[static_cast<std::size_t>(last)] = pick;
            return true;
        }
        if (count == s_)
            return rec(j + 1, 0, 0);
        auto& level = levels_[static_cast<std::size_t>(j)];
        for (int a = start; a <= g_.n() - (s_ - count); ++a) {
            if (explored_)
                ++*explored_;
            VertexId v{parts_[static_cast<std::size_t>(j)], a};
            const std::size_t mark = level.size();
            Bits saved_bad = bad_;
            for (const auto& c : prev_level(j)) {
                if (!c.cn[static_cast<std::size_t>(j)].test(static_cast<std::size_t>(a)))
                    continue;
                Clique ext;
                ext.cn.resize(static_cast<std::size_t>(r_));
                bool dead = false;
                for (int q = j + 1; q < r_; ++q) {
                    auto& b = ext.cn[static_cast<std::size_t>(q)];
                    b = c.cn[static_cast<std::size_t>(q)] & g_.neighbors(v, parts_[static_cast<std::size_t>(q)]);
                    dead = dead || b.none();
                }
                if (dead)
                    continue;
                if (j == last - 1)
                    bad_ |= ext.cn[static_cast<std::size_t>(last)];
                else
                    level.push_back(std::move(ext));
            }
            if (static_cast<int>(g_.n() - bad_.count()) >= s_) {
                chosen_[static_cast<std::size_t>(j)].set(static_cast<std::size_t>(a));
                if (rec(j, a + 1, count + 1))
                    return true;
                chosen_[static_cast<std::size_t>(j)].reset(static_cast<std::size_t>(a));
            }
            level.resize(mark);
            bad_ = std::move(saved_bad);
        }
        return false;
    }

    const PartiteGraph& g_;
    const std::vector<int>& parts_;
    int r_;
    int s_;
    std::uint64_t* explored_;
    std::vector<Bits> chosen_;
    std::vector<Clique> root_;
    std::vector<std::vector<Clique>> levels_;
    Bits bad_;
};

HoleCertificate empty_certificate(int r)
{
    HoleCertificate c;
    c.r = r;
    c.verified = true;
    return c;
}

} // namespace

bool verify_hole(const PartiteGraph& g, const HoleCertificate& cand)
{
    if (static_cast<int>(cand.parts.size()) != cand.r || cand.sets.size() != cand.parts.size())
        throw Error("malformed hole certificate");
    check_arena(g, cand.parts);
    for (const auto& b : cand.sets)
        if (b.size() != static_cast<std::size_t>(g.n()) || static_cast<int>(b.count()) != cand.s)
            throw Error("malformed hole certificate");
    return !clique_in(g, cand.parts, cand.sets, 0);
}

std::optional<HoleCertificate> find_hole_exact(const PartiteGraph& g, const std::vector<int>& parts, int s,
                                               std::uint64_t* explored)
{
    check_arena(g, parts);
    if (s < 1)
        throw Error("hole size must be positive");
    return ExactHoleSearch(g, parts, s, explored).run();
}

HoleReport alpha_star_exact(const PartiteGraph& g, int r, int cap)
{
    if (g.n() > cap)
        throw Error("exact mode refused: n = " + std::to_string(g.n()) + " exceeds cap " + std::to_string(cap) +
                    "; use the randomized lower bound");
    auto tuples = clique_part_tuples(g.pattern(), r);
    if (r < 2 || tuples.empty())
        throw Error("invalid hole arena");
    HoleReport rep;
    rep.r = r;
    rep.method = "exact";
    rep.witness = empty_certificate(r);
    for (const auto& t : tuples) {
        // A hole of size s contains one of size s - 1, so sizes are tried upwards.
        for (int s = rep.alpha + 1; s <= g.n(); ++s) {
            auto h = ExactHoleSearch(g, t, s, &rep.explored).run();
            if (!h)
                break;
            rep.alpha = s;
            rep.witness = std::move(*h);
        }
        if (rep.alpha == g.n())
            break;
    }
    return rep;
}

std::optional<HoleCertificate> alpha_star_lower_bound(const PartiteGraph& g, int r, int s, int trials,
                                                      std::uint64_t seed)
{
    if (s < 1)
        throw Error("hole size must be positive");
    auto tuples = clique_part_tuples(g.pattern(), r);
    if (r < 2 || tuples.empty() || s > g.n())
        return std::nullopt;
    const auto n = static_cast<std::size_t>(g.n());
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(trial)));
        const auto& parts = tuples[static_cast<std::size_t>(rng.below(static_cast<int>(tuples.size())))];
        std::vector<Bits> sets(parts.size(), Bits(n));
        std::vector<Bits> tabu(parts.size(), Bits(n));
        const int max_steps = 20 * r * s + 20;
        for (int step = 0; step < max_steps; ++step) {
            std::size_t j = 0;
            for (std::size_t q = 1; q < sets.size(); ++q)
                if (sets[q].count() < sets[j].count())
                    j = q;
            if (static_cast<int>(sets[j].count()) == s) {
                HoleCertificate c;
                c.r = r;
                c.parts = parts;
                c.sets = sets;
                c.s = s;
                c.verified = verify_hole(g, c);
                if (c.verified)
                    return c;
                break;
            }
            std::vector<int> best;
            int best_score = 0;
            for (int a = 0; a < g.n(); ++a) {
                auto ua = static_cast<std::size_t>(a);
                if (sets[j].test(ua) || tabu[j].test(ua))
                    continue;
                VertexId v{parts[j], a};
                std::vector<int> others;
                std::vector<Bits> cand;
                int score = 0;
                for (std::size_t q = 0; q < parts.size(); ++q) {
                    if (q == j)
                        continue;
                    others.push_back(parts[q]);
                    cand.push_back(sets[q] & g.neighbors(v, parts[q]));
                    score += g.degree(v, parts[q]);
                }
                if (clique_in(g, others, cand, 0))
                    continue;
                if (best.empty() || score < best_score) {
                    best.assign(1, a);
                    best_score = score;
                }
                else if (score == best_score) {
                    best.push_back(a);
                }
            }
            if (!best.empty()) {
                sets[j].set(static_cast<std::size_t>(best[static_cast<std::size_t>(rng.below(static_cast<int>(best.size())))]));
                continue;
            }
            // Stuck: drop a random vertex from another nonempty set and forbid re-adding it for a while.
            std::vector<std::size_t> donors;
            for (std::size_t q = 0; q < sets.size(); ++q)
                if (q != j && sets[q].any())
                    donors.push_back(q);
            if (donors.empty())
                break;
            auto q = donors[static_cast<std::size_t>(rng.below(static_cast<int>(donors.size())))];
            auto members = bits_to_vector(sets[q]);
            auto drop = static_cast<std::size_t>(members[static_cast<std::size_t>(rng.below(static_cast<int>(members.size())))]);
            sets[q].reset(drop);
            tabu[q].set(drop);
            if (step % (2 * s + 2) == 0)
                for (auto& t : tabu)
                    t.reset();
        }
    }
    return std::nullopt;
}

RegularityResult eps_regular_check(const PartiteGraph& g, const VertexSet& x, const VertexSet& y,
                                   const Rational& eps, const Rational& d)
{
    auto xs = x.vertices();
    auto ys = y.vertices();
    if (xs.size() > kRegularityCap || ys.size() > kRegularityCap)
        throw Error("regularity check limited to sides of at most 12 vertices");
    RegularityResult res;
    res.density = density(g, x, y);
    const auto a = static_cast<std::int64_t>(xs.size());
    const auto b = static_cast<std::int64_t>(ys.size());
    std::vector<std::uint32_t> nx(xs.size(), 0);
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < ys.size(); ++j)
            if (g.has_edge(xs[i], ys[j]))
                nx[i] |= 1u << j;
    std::int64_t e = 0;
    for (auto m : nx)
        e += std::popcount(m);
    auto to_sets = [&](std::uint32_t mx, std::uint32_t my) {
        VertexSet sx(g.k(), g.n()), sy(g.k(), g.n());
        for (std::size_t i = 0; i < xs.size(); ++i)
            if (mx >> i & 1u)
                sx.insert(xs[i]);
        for (std::size_t j = 0; j < ys.size(); ++j)
            if (my >> j & 1u)
                sy.insert(ys[j]);
        return std::pair(sx, sy);
    };
    if (res.density < d) {
        res.witness = std::pair(x, y);
        return res;
    }
    // |X'| >= eps|X| in integers: |X'| * den >= num * |X|.
    auto large = [&](int size, std::int64_t whole) {
        return size >= 1 && static_cast<std::int64_t>(size) * eps.den() >= eps.num() * whole;
    };
    const std::uint32_t fx = (1u << xs.size()) - 1, fy = (1u << ys.size()) - 1;
    for (std::uint32_t mx = 1; mx <= fx; ++mx) {
        const int ax = std::popcount(mx);
        if (!large(ax, a))
            continue;
        for (std::uint32_t my = 1; my <= fy; ++my) {
            const int by = std::popcount(my);
            if (!large(by, b))
                continue;
            std::int64_t ep = 0;
            for (std::size_t i = 0; i < xs.size(); ++i)
                if (mx >> i & 1u)
                    ep += std::popcount(nx[i] & my);
            const std::int64_t sub = static_cast<std::int64_t>(ax) * by;
            std::int64_t diff = ep * a * b - e * sub;
            if (diff < 0)
                diff = -diff;
            if (diff * eps.den() > eps.num() * sub * a * b) {
                res.witness = to_sets(mx, my);
                return res;
            }
        }
    }
    res.regular = true;
    return res;
}

json hole_certificate_to_json(const HoleCertificate& c)
{
    json parts = json::array(), sets = json::array();
    for (std::size_t i = 0; i < c.parts.size(); ++i) {
        parts.push_back(c.parts[i] + 1);
        json vs = json::array();
        for_each_bit(c.sets[i], [&](int a) { vs.push_back(vertex_to_json({c.parts[i], a})); });
        sets.push_back(vs);
    }
    return {{"r", c.r}, {"s", c.s}, {"parts", parts}, {"sets", sets}, {"verified", c.verified}};
}

json hole_report_to_json(const HoleReport& r)
{
    return {{"alpha", r.alpha},
            {"r", r.r},
            {"method", r.method},
            {"witness", hole_certificate_to_json(r.witness)},
            {"explored", r.explored}};
}

int alpha2_degree_bound(const PartiteGraph& g)
{
    int best = 0;
    for (auto [i, j] : g.pattern().edges())
        for (int a = 0; a < g.n(); ++a)
            best = std::max({best, g.n() - g.degree({i, a}, j), g.n() - g.degree({j, a}, i)});
    return best;
}

} // namespace ptile
