#pragma once

#include <cstdint>
#include <vector>

#include "multi_index.hpp"

namespace lmival::polyalg {

//! Binomial coefficient C(n, k); throws std::overflow_error past 2^64.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

//! Number of monomials in n variables of total degree <= d, i.e. C(n+d, n).
std::uint64_t count_monomials(std::size_t n, unsigned d);

//! Position of a multi-index in graded lexicographic order (constant first).
std::uint64_t grlex_rank(MultiIndex const& alpha);

//! Inverse of grlex_rank for n variables; negative ranks are rejected.
MultiIndex grlex_unrank(std::size_t n, std::int64_t rank);

//! All multi-indices of degree <= d in grlex order.
std::vector<MultiIndex> monomials_up_to(std::size_t n, unsigned d);

}  // namespace lmival::polyalg
