#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cotlift/chart.hpp"
#include "cotlift/symplectic.hpp"

namespace cotlift {

class SliceConstructionError : public Error {
public:
    using Error::Error;
};

class ClassificationAmbiguousError : public Error {
public:
    using Error::Error;
};

class NotEllipticError : public Error {
public:
    using Error::Error;
};

class NotFixedPointError : public Error {
public:
    using Error::Error;
};

// Numerical rank of the n x 2n matrix of gradients (df_1,...,df_n) at the
// point, by singular values with threshold tol_rank * sigma_max.
int rank_dF(const MomentMapSystem& system, const Vec& point, double tol_rank = 1e-8);

// The family A_i = Omega^{-1} Hess(g_i)(p) on the transverse symplectic
// slice, where the g_i are combinations of the f_i whose differentials vanish
// at p. At rank 0 the combinations are the f_i themselves and the slice is
// the whole tangent space; at rank k > 0 the slice is a symplectic
// complement of the orbit directions inside ker dF, built numerically (this
// construction is an operational stand-in for the orbit model and is flagged
// as such in reports).
struct LinearizedFamily {
    std::vector<Mat> matrices;   // 2m x 2m, m = n - k
    Mat slice_basis;             // 2n x 2m, columns (e_1..e_m, f_1..f_m)
    Mat combinations;            // n x m, column j gives g_j = sum_i comb(i,j) f_i
    int rank = 0;                // k
    int corank = 0;              // m
    bool slice_used = false;     // true when k > 0
};

LinearizedFamily transverse_linearization(const MomentMapSystem& system, const Vec& point,
                                          double tol_rank = 1e-8);

struct NondegeneracyResult {
    enum class Status { NonDegenerate, Degenerate, Inconclusive };
    Status status = Status::Degenerate;
    std::string reason;
    // Witness combination (when non-degenerate): coefficients and spectrum of
    // sum_i c_i A_i with 2m distinct eigenvalues.
    Vec witness_coefficients;
    std::vector<std::complex<double>> witness_spectrum;
    double max_commutator = 0.0;
    std::uint64_t seed = 0;
};

// Operational Cartan-subalgebra test: linear independence, pairwise
// commutation, and a generic combination with simple spectrum (coefficients
// resampled up to `trials` times from the seeded generator).
NondegeneracyResult is_nondegenerate(const LinearizedFamily& family, int trials = 8,
                                     double tol = 1e-8, std::uint64_t seed = 20240401);

struct WilliamsonType {
    int k_e = 0;
    int k_h = 0;
    int k_f = 0;
    bool operator==(const WilliamsonType&) const = default;
};

struct EigenGroup {
    enum class Kind { Elliptic, Hyperbolic, FocusFocus };
    Kind kind;
    std::vector<std::complex<double>> eigenvalues;
};

struct WilliamsonClassification {
    WilliamsonType type;
    std::vector<EigenGroup> groups;
};

// Classifies the witness spectrum: conjugate pure-imaginary pairs are
// elliptic, real +/- pairs hyperbolic, quadruples +/-a +/- ib focus-focus.
// Axis tolerance is tol * spectral radius. Throws
// ClassificationAmbiguousError when an eigenvalue sits within tolerance of
// both axes or the groups do not tile the spectrum.
WilliamsonClassification williamson_type(const LinearizedFamily& family,
                                         const NondegeneracyResult& witness, double tol = 1e-8);

// Weights of an S^1 moment map at a fixed point: positive imaginary parts of
// spec(Omega^{-1} Hess mu(p)) divided by 2, sorted ascending. Throws
// NotFixedPointError if X_mu(p) != 0, NotEllipticError on real parts beyond
// tol * spectral radius or on a (near-)zero Hessian.
std::vector<double> s1_weights(const Expr& mu, const DarbouxChart& chart, const Vec& point,
                               double tol = 1e-8);
// Same classification from an already-computed Hessian (numeric pipelines).
std::vector<double> s1_weights_from_hessian(const Mat& hessian, double tol = 1e-8);

struct ClassifyOptions {
    double tol_rank = 1e-8;
    double tol = 1e-8;
    int trials = 8;
    std::uint64_t seed = 20240401;
};

struct SingularPointReport {
    Vec point;
    int rank = 0;
    int corank = 0;
    NondegeneracyResult::Status status = NondegeneracyResult::Status::Degenerate;
    std::string status_reason;
    bool degenerate() const { return status != NondegeneracyResult::Status::NonDegenerate; }
    std::optional<WilliamsonType> williamson;
    std::vector<EigenGroup> eigen_data;
    std::optional<std::vector<double>> weights;  // n = 1 elliptic case
    bool slice_used = false;
    std::uint64_t seed = 0;
};

// Full pipeline at one point; returns nothing when the point is regular.
std::optional<SingularPointReport> classify_point(const MomentMapSystem& system, const Vec& point,
                                                  const ClassifyOptions& opts = {});

}  // namespace cotlift
