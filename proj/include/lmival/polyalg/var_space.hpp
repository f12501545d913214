#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lmival::polyalg {

/// Ordered list of unique variable names.
///
/// Copies share the underlying name list, so equality checks between
/// polynomials built from the same space are a pointer comparison.
class VarSpace {
  public:
    VarSpace() = default;
    explicit VarSpace(std::vector<std::string> names);

    std::size_t size() const noexcept { return names_ ? names_->size() : 0; }
    bool empty() const noexcept { return size() == 0; }

    std::string const& name(std::size_t i) const;
    std::vector<std::string> const& names() const;

    std::optional<std::size_t> find(std::string_view name) const;
    //! Index of a variable; throws std::invalid_argument if unknown.
    std::size_t index_of(std::string_view name) const;

    friend bool operator==(VarSpace const& a, VarSpace const& b);

  private:
    std::shared_ptr<std::vector<std::string> const> names_;
};

//! Throws std::invalid_argument naming both spaces when they differ.
void require_same_space(VarSpace const& a, VarSpace const& b,
                        std::string_view what);

}  // namespace lmival::polyalg
