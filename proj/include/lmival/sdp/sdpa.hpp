#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lmival/relaxation/relaxation.hpp"

namespace lmival::sdp {

using relaxation::SDProblem;

/// Sparse SDPA document: minimize c'x subject to sum_i F_i x_i - F_0 >= 0.
///
/// Block sizes are signed; a negative size marks a diagonal (LP) block.
/// Entries are 1-based and upper triangular.
struct SdpaDocument {
    struct Entry {
        std::size_t matno;
        std::size_t block;
        std::size_t i, j;
        double value;

        friend bool operator==(Entry const&, Entry const&) = default;
    };

    std::vector<std::string> comments;  // without the leading quote
    std::size_t m = 0;
    std::vector<long> block_sizes;
    std::vector<double> c;
    std::vector<Entry> entries;
    //! Objective constant carried in a header comment.
    double offset = 0.0;

    std::string to_text() const;

    friend bool operator==(SdpaDocument const&, SdpaDocument const&) = default;
};

class SdpaParseError : public std::runtime_error {
  public:
    SdpaParseError(std::size_t line, std::string const& msg)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line)
    {
    }
    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

/// x is the moment vector y. PSD blocks are written in their reduced
/// coordinates Z'F Z; every equality a'y = b becomes two rows of a trailing
/// LP block, a'y - b >= 0 and b - a'y >= 0.
SdpaDocument to_sdpa(SDProblem const& p);
std::string export_sdpa(SDProblem const& p);

//! Accepts the sparse format with `"` or `*` comment lines and the usual
//! separators ({}(), around numbers).
SdpaDocument parse_sdpa(std::string_view text);

/// Inverse of to_sdpa. LP rows that come in negated pairs become
/// equalities, other LP rows become 1x1 blocks, and a nonzero F_0 in a PSD
/// block adds a variable pinned to 1.
SDProblem from_sdpa(SdpaDocument const& doc);

}  // namespace lmival::sdp
