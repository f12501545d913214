#include "lmival/polyalg/grlex.hpp"

#include <stdexcept>
#include <string>

namespace lmival::polyalg {

__extension__ typedef unsigned __int128 u128;

std::uint64_t binomial(std::uint64_t n, std::uint64_t k)
{
    if (k > n)
        return 0;
    if (k > n - k)
        k = n - k;
    // Exact: C(n-k+i, i) is an integer at every step.
    u128 c = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        c = c * (n - k + i) / i;
        if (c > UINT64_MAX)
            throw std::overflow_error("binomial C(" + std::to_string(n) + ","
                                      + std::to_string(k) + ") overflows 64 bits");
    }
    return static_cast<std::uint64_t>(c);
}

std::uint64_t count_monomials(std::size_t n, unsigned d)
{
    if (n == 0)
        throw std::invalid_argument("count_monomials needs at least one variable");
    return binomial(n + d, n);
}

namespace {
// Monomials in `nvars` variables of degree exactly `deg`.
std::uint64_t count_exact(std::size_t nvars, unsigned deg)
{
    if (nvars == 0)
        return deg == 0 ? 1 : 0;
    return binomial(deg + nvars - 1, nvars - 1);
}
}  // namespace

std::uint64_t grlex_rank(MultiIndex const& alpha)
{
    std::size_t const n = alpha.size();
    if (n == 0)
        throw std::invalid_argument("grlex_rank of an empty multi-index");
    unsigned const deg = alpha.degree();
    std::uint64_t rank = deg == 0 ? 0 : count_monomials(n, deg - 1);
    unsigned remaining = deg;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        // Monomials whose i-th exponent is larger come first.
        for (unsigned e = remaining; e > alpha[i]; --e)
            rank += count_exact(n - i - 1, remaining - e);
        remaining -= alpha[i];
    }
    return rank;
}

MultiIndex grlex_unrank(std::size_t n, std::int64_t rank_in)
{
    if (n == 0)
        throw std::invalid_argument("grlex_unrank needs at least one variable");
    if (rank_in < 0)
        throw std::invalid_argument("grlex_unrank: negative rank " + std::to_string(rank_in));
    auto rank = static_cast<std::uint64_t>(rank_in);

    unsigned deg = 0;
    while (count_monomials(n, deg) <= rank)
        ++deg;
    rank -= deg == 0 ? 0 : count_monomials(n, deg - 1);

    MultiIndex alpha(n);
    unsigned remaining = deg;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        unsigned e = remaining;
        for (;; --e) {
            std::uint64_t block = count_exact(n - i - 1, remaining - e);
            if (rank < block)
                break;
            rank -= block;
        }
        alpha[i] = e;
        remaining -= e;
    }
    alpha[n - 1] = remaining;
    return alpha;
}

std::vector<MultiIndex> monomials_up_to(std::size_t n, unsigned d)
{
    auto const count = count_monomials(n, d);
    std::vector<MultiIndex> out;
    out.reserve(count);
    // Walk degree by degree, enumerating each degree in lex-descending order.
    for (unsigned deg = 0; deg <= d; ++deg) {
        MultiIndex a(n);
        a[0] = deg;
        while (true) {
            out.push_back(a);
            // Successor in descending lex order: move one unit from the last
            // non-zero slot before the final one, gathering the tail behind it.
            std::size_t pos = n;
            for (std::size_t k = n - 1; k-- > 0;)
                if (a[k] > 0) {
                    pos = k;
                    break;
                }
            if (pos == n)
                break;
            unsigned tail = a[n - 1];
            a[n - 1] = 0;
            a[pos] -= 1;
            a[pos + 1] = tail + 1;
        }
    }
    return out;
}

}  // namespace lmival::polyalg
