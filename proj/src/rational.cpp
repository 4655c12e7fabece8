#include "ptile/rational.hpp"

namespace ptile {

Rational Rational::parse(const std::string& text)
{
    try {
        auto slash = text.find('/');
        if (slash == std::string::npos)
            return Rational(std::stoll(text));
        return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
    }
    catch (const std::logic_error&) {
        throw Error("malformed rational '" + text + "'");
    }
}

} // namespace ptile
