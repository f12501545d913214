#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace lmival::polyalg {

/// Exponent vector of a monomial.
///
/// Ordering is graded lexicographic: total degree first, then the larger
/// leading exponent first, so (2,0) < (1,1) < (0,2). This is the order used
/// for every moment vector and matrix row in the library.
class MultiIndex {
  public:
    MultiIndex() = default;
    explicit MultiIndex(std::size_t n) : exps_(n, 0) {}
    explicit MultiIndex(std::vector<unsigned> exps) : exps_(std::move(exps)) {}
    MultiIndex(std::initializer_list<unsigned> exps) : exps_(exps) {}

    static MultiIndex unit(std::size_t n, std::size_t i);

    std::size_t size() const noexcept { return exps_.size(); }
    unsigned degree() const noexcept;
    unsigned operator[](std::size_t i) const { return exps_[i]; }
    unsigned& operator[](std::size_t i) { return exps_[i]; }
    std::vector<unsigned> const& exponents() const noexcept { return exps_; }

    auto begin() const noexcept { return exps_.begin(); }
    auto end() const noexcept { return exps_.end(); }

    MultiIndex operator+(MultiIndex const& other) const;
    //! True when every exponent of `other` is <= the matching one here.
    bool divisible_by(MultiIndex const& other) const;

    std::string to_string() const;

    friend bool operator==(MultiIndex const&, MultiIndex const&) = default;
    friend std::strong_ordering operator<=>(MultiIndex const& a, MultiIndex const& b);

  private:
    std::vector<unsigned> exps_;
};

}  // namespace lmival::polyalg
