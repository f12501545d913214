#include "lmival/polyalg/var_space.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace lmival::polyalg {

VarSpace::VarSpace(std::vector<std::string> names)
{
    if (names.empty())
        throw std::invalid_argument("variable space must have at least one variable");
    std::unordered_set<std::string> seen;
    for (auto const& n : names) {
        if (n.empty())
            throw std::invalid_argument("variable names must be non-empty");
        if (!seen.insert(n).second)
            throw std::invalid_argument("duplicate variable name '" + n + "'");
    }
    names_ = std::make_shared<std::vector<std::string> const>(std::move(names));
}

std::string const& VarSpace::name(std::size_t i) const
{
    if (i >= size())
        throw std::out_of_range("variable index out of range");
    return (*names_)[i];
}

std::vector<std::string> const& VarSpace::names() const
{
    static std::vector<std::string> const empty;
    return names_ ? *names_ : empty;
}

std::optional<std::size_t> VarSpace::find(std::string_view name) const
{
    if (!names_)
        return std::nullopt;
    auto it = std::find(names_->begin(), names_->end(), name);
    if (it == names_->end())
        return std::nullopt;
    return static_cast<std::size_t>(it - names_->begin());
}

std::size_t VarSpace::index_of(std::string_view name) const
{
    if (auto i = find(name))
        return *i;
    throw std::invalid_argument("unknown variable '" + std::string(name) + "'");
}

bool operator==(VarSpace const& a, VarSpace const& b)
{
    if (a.names_ == b.names_)
        return true;
    return a.names() == b.names();
}

namespace {
std::string describe(VarSpace const& s)
{
    std::string out = "(";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i)
            out += ",";
        out += s.name(i);
    }
    return out + ")";
}
}  // namespace

void require_same_space(VarSpace const& a, VarSpace const& b, std::string_view what)
{
    if (!(a == b))
        throw std::invalid_argument(std::string(what) + ": variable spaces differ "
                                    + describe(a) + " vs " + describe(b));
}

}  // namespace lmival::polyalg
