#include "cotlift/singularity.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "cotlift/sampling.hpp"

namespace cotlift {

namespace {

Mat gradient_matrix(const MomentMapSystem& system, const Vec& point) {
    const auto& chart = system.chart();
    VarBinding b = chart.bind(point);
    Mat g(system.size(), chart.dim());
    for (int i = 0; i < system.size(); ++i) {
        for (int j = 0; j < chart.dim(); ++j)
            g(i, j) = eval(system.component(i).diff(chart.coord(j)), b);
    }
    return g;
}

Mat hessian_matrix(const Expr& f, const DarbouxChart& chart, const Vec& point) {
    VarBinding b = chart.bind(point);
    auto h = hessian(f, chart.coords());
    Mat out(chart.dim(), chart.dim());
    for (int i = 0; i < chart.dim(); ++i)
        for (int j = 0; j < chart.dim(); ++j) out(i, j) = eval(h[i][j], b);
    return out;
}

int svd_rank(const Eigen::JacobiSVD<Mat>& svd, double rel_tol) {
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    double cutoff = rel_tol * sv[0];
    if (sv[0] == 0.0) return 0;
    int r = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > cutoff) ++r;
    return r;
}

// Darboux basis of the column span of S (assumed symplectic subspace):
// returns 2n x 2m matrix E = (e_1..e_m | f_1..f_m) with E^T Omega E standard.
Mat symplectic_gram_schmidt(const Mat& span, const Mat& omega) {
    std::vector<Vec> pool;
    for (int c = 0; c < span.cols(); ++c) pool.push_back(span.col(c));
    const int m = static_cast<int>(pool.size()) / 2;
    std::vector<Vec> es, fs;
    for (int step = 0; step < m; ++step) {
        // pick the largest remaining vector, then its best symplectic partner
        int iu = -1;
        double best = -1.0;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            double nrm = pool[i].norm();
            if (nrm > best) {
                best = nrm;
                iu = static_cast<int>(i);
            }
        }
        Vec u = pool[iu] / pool[iu].norm();
        pool.erase(pool.begin() + iu);
        int iv = -1;
        double pairing = 0.0;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            double w = u.dot(omega * pool[i]);
            if (std::abs(w) > std::abs(pairing)) {
                pairing = w;
                iv = static_cast<int>(i);
            }
        }
        if (iv < 0 || std::abs(pairing) < 1e-12)
            throw SliceConstructionError("slice span degenerated during Darboux reduction");
        Vec v = pool[iv] / pairing;  // omega(u, v) = 1
        pool.erase(pool.begin() + iv);
        for (auto& w : pool) {
            double wu = u.dot(omega * w);   // omega(u, w)
            double wv = v.dot(omega * w);   // omega(v, w)
            // make w symplectically orthogonal to both u and v
            w = w + wv * u - wu * v;
        }
        es.push_back(u);
        fs.push_back(v);
    }
    Mat e(omega.rows(), 2 * m);
    for (int i = 0; i < m; ++i) {
        e.col(i) = es[i];
        e.col(m + i) = fs[i];
    }
    return e;
}

}  // namespace

int rank_dF(const MomentMapSystem& system, const Vec& point, double tol_rank) {
    Mat g = gradient_matrix(system, point);
    Eigen::JacobiSVD<Mat> svd(g);
    return svd_rank(svd, tol_rank);
}

LinearizedFamily transverse_linearization(const MomentMapSystem& system, const Vec& point,
                                          double tol_rank) {
    const int n = system.size();
    const int dim = system.chart().dim();
    Mat g = gradient_matrix(system, point);
    Eigen::JacobiSVD<Mat> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const int k = svd_rank(svd, tol_rank);
    if (k >= n) throw ValidationError("point is regular; no transverse linearization");
    const int m = n - k;

    LinearizedFamily fam;
    fam.rank = k;
    fam.corank = m;

    std::vector<Mat> hessians;
    hessians.reserve(n);
    for (int i = 0; i < n; ++i)
        hessians.push_back(hessian_matrix(system.component(i), system.chart(), point));

    if (k == 0) {
        fam.slice_basis = Mat::Identity(dim, dim);
        fam.combinations = Mat::Identity(n, n);
        Mat omega_inv = standard_omega_inverse(system.chart().dof());
        for (int i = 0; i < n; ++i) fam.matrices.push_back(omega_inv * hessians[i]);
        return fam;
    }
    fam.slice_used = true;

    const Mat omega = standard_omega(system.chart().dof());
    const Mat omega_inv = standard_omega_inverse(system.chart().dof());

    // Combinations with critical point at p: left null space of the gradient
    // matrix (columns k..n-1 of U).
    fam.combinations = svd.matrixU().rightCols(m);

    // ker dF and the orbit directions X_{f_i}(p).
    Mat kernel = svd.matrixV().rightCols(dim - k);          // dim x (dim - k)
    Mat orbit = omega_inv * svd.matrixV().leftCols(k);      // dim x k

    // Isotropy of the orbit span inside ker dF requires involution at p.
    double scale = svd.singularValues()[0];
    double iso = (g * orbit).cwiseAbs().maxCoeff();
    if (iso > 1e-7 * std::max(1.0, scale))
        throw SliceConstructionError(
            "orbit directions are not isotropic at the point (system not in involution there)");

    // Omega restricted to ker dF has radical = orbit span; its range picks a
    // symplectic complement.
    Mat restricted = kernel.transpose() * omega * kernel;
    Eigen::JacobiSVD<Mat> bsvd(restricted, Eigen::ComputeFullU);
    int brank = svd_rank(bsvd, 1e-10);
    if (brank != 2 * m)
        throw SliceConstructionError("restricted form rank " + std::to_string(brank) +
                                     ", expected " + std::to_string(2 * m));
    Mat slice_span = kernel * bsvd.matrixU().leftCols(2 * m);
    fam.slice_basis = symplectic_gram_schmidt(slice_span, omega);

    const Mat omega_m_inv = standard_omega_inverse(m);
    for (int j = 0; j < m; ++j) {
        Mat h = Mat::Zero(dim, dim);
        for (int i = 0; i < n; ++i) h += fam.combinations(i, j) * hessians[i];
        Mat restricted_h = fam.slice_basis.transpose() * h * fam.slice_basis;
        fam.matrices.push_back(omega_m_inv * restricted_h);
    }
    return fam;
}

NondegeneracyResult is_nondegenerate(const LinearizedFamily& family, int trials, double tol,
                                     std::uint64_t seed) {
    NondegeneracyResult result;
    result.seed = seed;
    const int m = static_cast<int>(family.matrices.size());
    if (m == 0) {
        result.reason = "empty family";
        return result;
    }
    const int dim = static_cast<int>(family.matrices[0].rows());

    double max_norm = 0.0;
    for (const Mat& a : family.matrices) max_norm = std::max(max_norm, a.norm());
    if (max_norm == 0.0) {
        result.reason = "zero Hessian family";
        return result;
    }

    // (a) linear independence of the A_i (norm-balanced so the test does not
    // hinge on relative scales; an exactly-zero member is dependence)
    Mat stacked(m, dim * dim);
    for (int i = 0; i < m; ++i) {
        Mat a = family.matrices[i];
        double nrm = a.norm();
        if (nrm <= 1e-12 * std::max(1.0, max_norm)) {
            result.reason = "family contains a zero matrix";
            return result;
        }
        a /= nrm;
        stacked.row(i) = Eigen::Map<Eigen::RowVectorXd>(a.data(), dim * dim);
    }
    Eigen::JacobiSVD<Mat> svd(stacked);
    if (svd_rank(svd, 1e-8) < m) {
        result.reason = "family is linearly dependent";
        return result;
    }

    // (b) pairwise commutation
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            const Mat& a = family.matrices[i];
            const Mat& b = family.matrices[j];
            double comm = (a * b - b * a).cwiseAbs().maxCoeff();
            result.max_commutator = std::max(result.max_commutator, comm);
            if (comm > tol * std::max(1.0, a.norm() * b.norm())) {
                result.reason = "family does not commute";
                return result;
            }
        }
    }

    // (c) a generic combination with simple spectrum
    Rng rng(seed);
    for (int t = 0; t < trials; ++t) {
        Vec c(m);
        for (int i = 0; i < m; ++i) c[i] = rng.symmetric();
        Mat combo = Mat::Zero(dim, dim);
        for (int i = 0; i < m; ++i) combo += c[i] * family.matrices[i];
        Eigen::EigenSolver<Mat> es(combo, /*computeEigenvectors=*/false);
        std::vector<std::complex<double>> spectrum(es.eigenvalues().data(),
                                                   es.eigenvalues().data() + dim);
        double radius = 0.0;
        for (const auto& z : spectrum) radius = std::max(radius, std::abs(z));
        double gap_tol = tol * std::max(1.0, radius);
        bool simple = radius > 0.0;
        for (int i = 0; simple && i < dim; ++i)
            for (int j = i + 1; simple && j < dim; ++j)
                if (std::abs(spectrum[i] - spectrum[j]) <= gap_tol) simple = false;
        if (simple) {
            result.status = NondegeneracyResult::Status::NonDegenerate;
            result.witness_coefficients = c;
            result.witness_spectrum = std::move(spectrum);
            return result;
        }
    }
    result.status = NondegeneracyResult::Status::Inconclusive;
    result.reason = "all trial combinations produced clustered spectra";
    return result;
}

WilliamsonClassification williamson_type(const LinearizedFamily& family,
                                         const NondegeneracyResult& witness, double tol) {
    if (witness.status != NondegeneracyResult::Status::NonDegenerate)
        throw ValidationError("williamson_type needs a non-degenerate witness");
    const auto& spectrum = witness.witness_spectrum;
    double radius = 0.0;
    for (const auto& z : spectrum) radius = std::max(radius, std::abs(z));
    const double axis_tol = tol * radius;

    WilliamsonClassification out;
    auto near_real = [&](const std::complex<double>& z) { return std::abs(z.imag()) <= axis_tol; };
    auto near_imag = [&](const std::complex<double>& z) { return std::abs(z.real()) <= axis_tol; };

    for (const auto& z : spectrum) {
        if (near_real(z) && near_imag(z))
            throw ClassificationAmbiguousError(
                "eigenvalue within tolerance of both axes; classification ambiguous");
    }

    auto conj_partner = [&](const std::complex<double>& z) {
        for (const auto& w : spectrum)
            if (std::abs(w - std::conj(z)) <= axis_tol * 4 + 1e-300) return w;
        return std::conj(z);
    };
    auto neg_partner = [&](const std::complex<double>& z) {
        for (const auto& w : spectrum)
            if (std::abs(w + z) <= axis_tol * 4 + 1e-300) return w;
        return -z;
    };

    for (const auto& z : spectrum) {
        if (near_imag(z) && z.imag() > axis_tol) {
            EigenGroup grp;
            grp.kind = EigenGroup::Kind::Elliptic;
            grp.eigenvalues = {z, conj_partner(z)};
            out.groups.push_back(std::move(grp));
            ++out.type.k_e;
        } else if (near_real(z) && z.real() > axis_tol) {
            EigenGroup grp;
            grp.kind = EigenGroup::Kind::Hyperbolic;
            grp.eigenvalues = {z, neg_partner(z)};
            out.groups.push_back(std::move(grp));
            ++out.type.k_h;
        } else if (z.real() > axis_tol && z.imag() > axis_tol) {
            EigenGroup grp;
            grp.kind = EigenGroup::Kind::FocusFocus;
            grp.eigenvalues = {z, conj_partner(z), neg_partner(z), neg_partner(conj_partner(z))};
            out.groups.push_back(std::move(grp));
            ++out.type.k_f;
        }
    }
    const int dim = static_cast<int>(spectrum.size());
    if (2 * out.type.k_e + 2 * out.type.k_h + 4 * out.type.k_f != dim)
        throw ClassificationAmbiguousError("eigenvalue groups do not tile the spectrum");
    return out;
}

std::vector<double> s1_weights_from_hessian(const Mat& hess, double tol) {
    const int dim = static_cast<int>(hess.rows());
    if (dim % 2 != 0 || hess.cols() != dim)
        throw ValidationError("hessian must be square and even-dimensional");
    const int n = dim / 2;
    Mat a = standard_omega_inverse(n) * hess;
    Eigen::EigenSolver<Mat> es(a, /*computeEigenvectors=*/false);
    double radius = 0.0;
    for (int i = 0; i < dim; ++i) radius = std::max(radius, std::abs(es.eigenvalues()[i]));
    if (radius <= 1e-12 * std::max(1.0, hess.cwiseAbs().maxCoeff()) || radius == 0.0)
        throw NotEllipticError("zero Hessian: quadratic part vanishes");
    std::vector<double> weights;
    for (int i = 0; i < dim; ++i) {
        auto z = es.eigenvalues()[i];
        if (std::abs(z.real()) > tol * radius)
            throw NotEllipticError("spectrum has a real part; quadratic part is not elliptic");
        if (z.imag() > tol * radius) weights.push_back(z.imag() / 2.0);
    }
    if (static_cast<int>(weights.size()) != n)
        throw NotEllipticError("spectrum does not split into n elliptic pairs");
    std::sort(weights.begin(), weights.end());
    return weights;
}

std::vector<double> s1_weights(const Expr& mu, const DarbouxChart& chart, const Vec& point,
                               double tol) {
    VectorFieldExpr field = hamiltonian_vector_field(mu, chart);
    Vec v = field.eval_at(point);
    if (v.cwiseAbs().maxCoeff() > 1e-8 * (1.0 + point.cwiseAbs().maxCoeff()))
        throw NotFixedPointError("point is not a fixed point of the S^1 flow");
    return s1_weights_from_hessian(hessian_matrix(mu, chart, point), tol);
}

std::optional<SingularPointReport> classify_point(const MomentMapSystem& system, const Vec& point,
                                                  const ClassifyOptions& opts) {
    const int n = system.size();
    int k = rank_dF(system, point, opts.tol_rank);
    if (k >= n) return std::nullopt;

    SingularPointReport report;
    report.point = point;
    report.rank = k;
    report.corank = n - k;
    report.seed = opts.seed;

    LinearizedFamily fam = transverse_linearization(system, point, opts.tol_rank);
    report.slice_used = fam.slice_used;
    NondegeneracyResult nd = is_nondegenerate(fam, opts.trials, opts.tol, opts.seed);
    report.status = nd.status;
    report.status_reason = nd.reason;
    if (nd.status == NondegeneracyResult::Status::NonDegenerate) {
        WilliamsonClassification cls = williamson_type(fam, nd, opts.tol);
        report.williamson = cls.type;
        report.eigen_data = std::move(cls.groups);
        if (n == 1 && cls.type.k_e == 1) {
            try {
                report.weights = s1_weights(system.component(0), system.chart(), point, opts.tol);
            } catch (const Error&) {
                // weights stay absent
            }
        }
    }
    return report;
}

}  // namespace cotlift
