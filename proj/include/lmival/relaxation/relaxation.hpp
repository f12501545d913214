#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lmival/gmp/gmp.hpp"

namespace lmival::relaxation {

using gmp::GMProblem;
using gmp::LinearMomentExpr;
using gmp::MeasureDecl;
using gmp::MomentKey;
using polyalg::MultiIndex;
using polyalg::Polynomial;

/// Where each free measure's moments live in the global vector y.
class MomentLayout {
  public:
    struct Block {
        std::size_t measure;
        unsigned degree;  // moments of degree <= degree, i.e. twice the matrix order
        std::size_t offset;
        std::size_t count;
    };

    MomentLayout() = default;
    //! `degrees[i]` applies to the i-th free measure of `measures`.
    MomentLayout(std::vector<MeasureDecl> const& measures, std::vector<unsigned> const& degrees);

    std::size_t size() const noexcept { return total_; }
    std::vector<Block> const& blocks() const noexcept { return blocks_; }
    bool contains(std::size_t measure) const noexcept;
    Block const& block_of(std::size_t measure) const;
    //! Global coordinate; throws std::out_of_range if not housed.
    std::size_t index(MomentKey const& key) const;
    MomentKey key(std::size_t index) const;

  private:
    std::vector<Block> blocks_;
    std::vector<std::optional<std::size_t>> by_measure_;
    std::size_t total_ = 0;
    std::size_t nvars_ = 0;
};

/// Moment or localizing matrix of one measure, symbolic in the moments.
struct PSDBlockSpec {
    std::size_t measure = 0;
    Polynomial generator;  // constant 1 for the moment matrix
    unsigned order = 0;    // rows are monomials of degree <= order
    std::vector<MultiIndex> basis;

    std::size_t side() const noexcept { return basis.size(); }
    //! sum_gamma g_gamma y_{a_i + a_j + gamma}
    LinearMomentExpr entry(std::size_t i, std::size_t j) const;
};

PSDBlockSpec moment_matrix_spec(MeasureDecl const& m, unsigned d);
//! Matrix order d - ceil(deg g / 2); throws if deg g > 2d.
PSDBlockSpec localizing_matrix_spec(MeasureDecl const& m, Polynomial const& g, unsigned d);

/// Numeric form: F(y) = sum_e coef_e * y[var_e] placed at (row_e, col_e) and
/// its mirror. Entries are stored for row <= col only.
struct PSDBlock {
    struct Entry {
        std::size_t row, col, var;
        double coef;
    };
    std::string label;
    std::size_t measure = 0;
    std::size_t side = 0;
    std::vector<Entry> entries;
    //! Optional side x k basis with orthonormal columns: the constraint is
    //! Z' F(y) Z >= 0 instead of F(y) >= 0.
    std::optional<Eigen::MatrixXd> reduction;

    std::size_t reduced_side() const noexcept
    {
        return reduction ? static_cast<std::size_t>(reduction->cols()) : side;
    }
    Eigen::MatrixXd dense(Eigen::VectorXd const& y) const;
};

struct SparseRow {
    std::vector<std::pair<std::size_t, double>> entries;  // sorted by index
    double rhs = 0.0;
    std::string label;
};

/// min c'y + c0  s.t.  A y = b,  every block PSD.
struct SDProblem {
    std::size_t num_vars = 0;
    std::vector<double> c;
    double c0 = 0.0;
    std::vector<SparseRow> equalities;
    std::vector<PSDBlock> blocks;
    //! Optional typical magnitude of each y coordinate. The solver works in
    //! y / var_scale; the problem itself is unchanged.
    std::vector<double> var_scale;
};

struct Relaxation {
    SDProblem sdp;
    MomentLayout layout;
    GMProblem folded;
    //! Matrix order per measure id (0 for fixed measures).
    std::vector<unsigned> measure_order;
    unsigned requested_order = 0;
    double objective_sign = 1.0;
};

struct AssemblyOptions {
    //! Replace blocks by Z'FZ where equality supports force known null vectors.
    bool facial_reduction = true;
    //! Fill SDProblem::var_scale from coordinate bounds implied by the supports.
    bool scale_hints = true;
};

//! Per-variable bound min(1, r_i) read off support polynomials of the form
//! c - sum_i a_i x_i^2 (a_i >= 0); 1 where nothing is implied.
std::vector<double> coordinate_scales(models::SemialgebraicSet const& s, std::size_t nvars);

Relaxation assemble_relaxation(GMProblem const& gmp, unsigned d, AssemblyOptions const& o = {});

struct SizeReport {
    std::uint64_t moments_per_measure;  // N = C(n+2d, n)
    std::uint64_t matrix_side;          // M = C(n+d, n)
    std::uint64_t total_moments;        // K * N
    std::string note;
};

SizeReport relaxation_size(std::size_t n, unsigned d, std::size_t K);

//! Numerical rank of A (column-pivoted QR, relative tolerance).
std::size_t equality_rank(SDProblem const& p, double tol = 1e-10);

}  // namespace lmival::relaxation
