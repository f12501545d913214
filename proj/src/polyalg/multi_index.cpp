#include "lmival/polyalg/multi_index.hpp"

#include <numeric>
#include <stdexcept>

namespace lmival::polyalg {

MultiIndex MultiIndex::unit(std::size_t n, std::size_t i)
{
    if (i >= n)
        throw std::out_of_range("unit multi-index position out of range");
    MultiIndex m(n);
    m.exps_[i] = 1;
    return m;
}

unsigned MultiIndex::degree() const noexcept
{
    return std::accumulate(exps_.begin(), exps_.end(), 0u);
}

MultiIndex MultiIndex::operator+(MultiIndex const& other) const
{
    if (other.size() != size())
        throw std::invalid_argument("multi-index length mismatch");
    MultiIndex r(*this);
    for (std::size_t i = 0; i < size(); ++i)
        r.exps_[i] += other.exps_[i];
    return r;
}

bool MultiIndex::divisible_by(MultiIndex const& other) const
{
    if (other.size() != size())
        return false;
    for (std::size_t i = 0; i < size(); ++i)
        if (other.exps_[i] > exps_[i])
            return false;
    return true;
}

std::string MultiIndex::to_string() const
{
    std::string s = "(";
    for (std::size_t i = 0; i < size(); ++i) {
        if (i)
            s += ",";
        s += std::to_string(exps_[i]);
    }
    return s + ")";
}

std::strong_ordering operator<=>(MultiIndex const& a, MultiIndex const& b)
{
    if (auto c = a.degree() <=> b.degree(); c != 0)
        return c;
    if (auto c = a.size() <=> b.size(); c != 0)
        return c;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.exps_[i] != b.exps_[i])
            return b.exps_[i] <=> a.exps_[i];
    }
    return std::strong_ordering::equal;
}

}  // namespace lmival::polyalg
