#include "ccgf/module_space.hpp"

#include <algorithm>
#include <cmath>

namespace ccgf {

namespace {

Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& M) {
    return 0.5 * (M + M.adjoint());
}

}  // namespace

ModuleVector::ModuleVector(int m, int n) {
    if (m < 1 || n < 1) {
        throw DimensionError("module vector needs m >= 1 slots and dimension n >= 1");
    }
    slots_.assign(m, Eigen::VectorXcd::Zero(n));
}

ModuleVector::ModuleVector(std::vector<Eigen::VectorXcd> slots) : slots_(std::move(slots)) {
    if (slots_.empty() || slots_.front().size() < 1) {
        throw DimensionError("module vector needs m >= 1 slots and dimension n >= 1");
    }
    for (const auto& v : slots_) {
        if (v.size() != slots_.front().size()) {
            throw DimensionError("module vector slots must share one dimension");
        }
    }
}

ModuleVector ModuleVector::basis(int m, int n, int i) {
    if (i < 0 || i >= n) throw DimensionError("basis index out of range");
    ModuleVector f(m, n);
    for (int s = 0; s < m; ++s) f.slots_[s](i) = Complex(1.0, 0.0);
    return f;
}

ModuleVector ModuleVector::random(int m, int n, Rng& rng) {
    ModuleVector f(m, n);
    for (int s = 0; s < m; ++s)
        for (int i = 0; i < n; ++i) f.slots_[s](i) = rng.cnormal();
    return f;
}

ModuleVector ModuleVector::operator+(const ModuleVector& rhs) const {
    if (slot_count() != rhs.slot_count() || dim() != rhs.dim()) {
        throw DimensionError("module vector shape mismatch in +");
    }
    std::vector<Eigen::VectorXcd> out(slots_.size());
    for (size_t s = 0; s < slots_.size(); ++s) out[s] = slots_[s] + rhs.slots_[s];
    return ModuleVector(std::move(out));
}

ModuleVector ModuleVector::operator-(const ModuleVector& rhs) const {
    if (slot_count() != rhs.slot_count() || dim() != rhs.dim()) {
        throw DimensionError("module vector shape mismatch in -");
    }
    std::vector<Eigen::VectorXcd> out(slots_.size());
    for (size_t s = 0; s < slots_.size(); ++s) out[s] = slots_[s] - rhs.slots_[s];
    return ModuleVector(std::move(out));
}

ModuleVector ModuleVector::scaled(Complex alpha) const {
    std::vector<Eigen::VectorXcd> out(slots_.size());
    for (size_t s = 0; s < slots_.size(); ++s) out[s] = alpha * slots_[s];
    return ModuleVector(std::move(out));
}

ModuleVector ModuleVector::scaled(const AlgebraElement& a) const {
    if (a.size() != slot_count()) throw DimensionError("algebra element slot mismatch");
    std::vector<Eigen::VectorXcd> out(slots_.size());
    for (size_t s = 0; s < slots_.size(); ++s) out[s] = a[static_cast<int>(s)] * slots_[s];
    return ModuleVector(std::move(out));
}

double ModuleVector::norm() const {
    double n2 = 0.0;
    for (const auto& v : slots_) n2 = std::max(n2, v.squaredNorm());
    return std::sqrt(n2);
}

AlgebraElement inner_product(const ModuleVector& f, const ModuleVector& g) {
    if (f.slot_count() != g.slot_count() || f.dim() != g.dim()) {
        throw DimensionError("inner product shape mismatch");
    }
    std::vector<Complex> v(f.slot_count());
    // Eigen's dot() conjugates its first argument; <f,g> here conjugates g.
    for (int s = 0; s < f.slot_count(); ++s) v[s] = g.slot(s).dot(f.slot(s));
    return AlgebraElement(std::move(v));
}

AdjointableOp::AdjointableOp(std::vector<Eigen::MatrixXcd> blocks) : blocks_(std::move(blocks)) {
    if (blocks_.empty() || blocks_.front().rows() < 1 || blocks_.front().cols() < 1) {
        throw DimensionError("operator needs m >= 1 nonempty blocks");
    }
    for (const auto& b : blocks_) {
        if (b.rows() != blocks_.front().rows() || b.cols() != blocks_.front().cols()) {
            throw DimensionError("operator blocks must share one shape");
        }
    }
}

AdjointableOp AdjointableOp::identity(int m, int n) {
    return AdjointableOp(std::vector<Eigen::MatrixXcd>(m, Eigen::MatrixXcd::Identity(n, n)));
}

AdjointableOp AdjointableOp::zero(int m, int p, int n) {
    return AdjointableOp(std::vector<Eigen::MatrixXcd>(m, Eigen::MatrixXcd::Zero(p, n)));
}

AdjointableOp AdjointableOp::scalar(int m, int n, Complex alpha) {
    return AdjointableOp(
        std::vector<Eigen::MatrixXcd>(m, alpha * Eigen::MatrixXcd::Identity(n, n)));
}

AdjointableOp AdjointableOp::diagonal(const std::vector<Eigen::VectorXcd>& diags) {
    std::vector<Eigen::MatrixXcd> blocks(diags.size());
    for (size_t s = 0; s < diags.size(); ++s) {
        blocks[s] = diags[s].asDiagonal();
    }
    return AdjointableOp(std::move(blocks));
}

ModuleVector AdjointableOp::apply(const ModuleVector& f) const {
    if (f.slot_count() != slot_count() || f.dim() != domain_dim()) {
        throw DimensionError("operator domain mismatch in apply");
    }
    std::vector<Eigen::VectorXcd> out(blocks_.size());
    for (size_t s = 0; s < blocks_.size(); ++s) out[s] = blocks_[s] * f.slot(static_cast<int>(s));
    return ModuleVector(std::move(out));
}

AdjointableOp AdjointableOp::compose(const AdjointableOp& rhs) const {
    if (rhs.slot_count() != slot_count() || rhs.codomain_dim() != domain_dim()) {
        throw DimensionError("operator dimension mismatch in compose");
    }
    std::vector<Eigen::MatrixXcd> out(blocks_.size());
    for (size_t s = 0; s < blocks_.size(); ++s) out[s] = blocks_[s] * rhs.blocks_[s];
    return AdjointableOp(std::move(out));
}

AdjointableOp AdjointableOp::adjoint() const {
    std::vector<Eigen::MatrixXcd> out(blocks_.size());
    for (size_t s = 0; s < blocks_.size(); ++s) out[s] = blocks_[s].adjoint();
    return AdjointableOp(std::move(out));
}

AdjointableOp AdjointableOp::operator+(const AdjointableOp& rhs) const {
    require_same_shape(*this, rhs);
    std::vector<Eigen::MatrixXcd> out(blocks_.size());
    for (size_t s = 0; s < blocks_.size(); ++s) out[s] = blocks_[s] + rhs.blocks_[s];
    return AdjointableOp(std::move(out));
}

AdjointableOp AdjointableOp::operator-(const AdjointableOp& rhs) const {
    require_same_shape(*this, rhs);
    std::vector<Eigen::MatrixXcd> out(blocks_.size());
    for (size_t s = 0; s < blocks_.size(); ++s) out[s] = blocks_[s] - rhs.blocks_[s];
    return AdjointableOp(std::move(out));
}

AdjointableOp AdjointableOp::scaled(Complex alpha) const {
    std::vector<Eigen::MatrixXcd> out(blocks_.size());
    for (size_t s = 0; s < blocks_.size(); ++s) out[s] = alpha * blocks_[s];
    return AdjointableOp(std::move(out));
}

AdjointableOp AdjointableOp::scaled(const AlgebraElement& a) const {
    if (a.size() != slot_count()) throw DimensionError("algebra element slot mismatch");
    std::vector<Eigen::MatrixXcd> out(blocks_.size());
    for (size_t s = 0; s < blocks_.size(); ++s) out[s] = a[static_cast<int>(s)] * blocks_[s];
    return AdjointableOp(std::move(out));
}

double AdjointableOp::norm() const {
    double n = 0.0;
    for (const auto& b : blocks_) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(b);
        if (svd.singularValues().size() > 0) n = std::max(n, svd.singularValues()(0));
    }
    return n;
}

void require_same_shape(const AdjointableOp& a, const AdjointableOp& b) {
    if (a.slot_count() != b.slot_count() || a.codomain_dim() != b.codomain_dim() ||
        a.domain_dim() != b.domain_dim()) {
        throw DimensionError("operator shape mismatch");
    }
}

OpClassification classify(const AdjointableOp& T) {
    OpClassification c;
    const int p = T.codomain_dim();
    const int n = T.domain_dim();
    double nrm = 0.0;
    double gap = std::numeric_limits<double>::infinity();
    for (int s = 0; s < T.slot_count(); ++s) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(T.block(s));
        const auto& sv = svd.singularValues();
        nrm = std::max(nrm, sv.size() > 0 ? sv(0) : 0.0);
        // A wide block has a kernel regardless of its singular values.
        double slot_gap = (p < n) ? 0.0 : (sv.size() > 0 ? sv(sv.size() - 1) : 0.0);
        gap = std::min(gap, slot_gap);
    }
    c.norm = nrm;
    c.min_gap = gap;
    c.bounded_below = gap > kAlgebraTol;
    if (p == n) {
        double tol = kAlgebraTol * std::max(1.0, nrm);
        bool sa = true;
        double lambda_min = std::numeric_limits<double>::infinity();
        for (int s = 0; s < T.slot_count(); ++s) {
            sa = sa && (T.block(s) - T.block(s).adjoint()).cwiseAbs().maxCoeff() <= tol;
        }
        if (sa) {
            for (int s = 0; s < T.slot_count(); ++s) {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian_part(T.block(s)),
                                                                   Eigen::EigenvaluesOnly);
                lambda_min = std::min(lambda_min, es.eigenvalues()(0));
            }
        }
        c.self_adjoint = sa;
        c.positive = sa && lambda_min >= -tol;
        c.invertible = gap > kAlgebraTol;
        c.gl_plus = c.positive && c.invertible;
    }
    return c;
}

CommutationCheck commutes(const AdjointableOp& T, const AdjointableOp& S, double tol) {
    if (T.slot_count() != S.slot_count() || T.domain_dim() != S.domain_dim() ||
        T.codomain_dim() != T.domain_dim() || S.codomain_dim() != S.domain_dim()) {
        throw DimensionError("commutation requires square operators on one module");
    }
    AdjointableOp comm = T.compose(S) - S.compose(T);
    CommutationCheck out;
    out.residual = comm.norm();
    out.commute = out.residual <= tol * (1.0 + T.norm() * S.norm());
    return out;
}

AdjointableOp op_sqrt(const AdjointableOp& T) {
    OpClassification c = classify(T);
    if (!c.self_adjoint || !c.positive) {
        throw PositivityError("op_sqrt requires a positive operator");
    }
    return hermitian_function(T, [](double x) { return std::sqrt(x); }, 0.0);
}

AdjointableOp op_inverse(const AdjointableOp& T, double tol) {
    if (T.codomain_dim() != T.domain_dim()) {
        throw DimensionError("op_inverse requires a square operator");
    }
    OpClassification c = classify(T);
    if (c.min_gap <= tol) {
        throw SingularError("operator not invertible: min singular value " +
                            std::to_string(c.min_gap));
    }
    std::vector<Eigen::MatrixXcd> out(T.slot_count());
    for (int s = 0; s < T.slot_count(); ++s) {
        out[s] = T.block(s).partialPivLu().inverse();
    }
    return AdjointableOp(std::move(out));
}

AdjointableOp hermitian_function(const AdjointableOp& T, double (*f)(double), double floor) {
    if (T.codomain_dim() != T.domain_dim()) {
        throw DimensionError("hermitian_function requires a square operator");
    }
    std::vector<Eigen::MatrixXcd> out(T.slot_count());
    for (int s = 0; s < T.slot_count(); ++s) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian_part(T.block(s)));
        Eigen::VectorXd d = es.eigenvalues();
        // Eigenvalues inside the floor band act as exact zeros; anything
        // further below is the caller's positivity error to raise.
        for (int i = 0; i < d.size(); ++i) {
            if (d(i) < -kAlgebraTol * std::max(1.0, std::abs(d(d.size() - 1)))) {
                throw PositivityError("negative eigenvalue " + std::to_string(d(i)) +
                                      " in hermitian_function");
            }
            d(i) = (d(i) <= floor) ? 0.0 : f(d(i));
        }
        out[s] = es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
    }
    return AdjointableOp(std::move(out));
}

Projector::Projector(AdjointableOp P, double tol) : op_(std::move(P)) {
    if (op_.codomain_dim() != op_.domain_dim()) {
        throw DimensionError("projector must be square");
    }
    double scale = std::max(1.0, op_.norm());
    AdjointableOp idem = op_.compose(op_) - op_;
    AdjointableOp herm = op_ - op_.adjoint();
    if (idem.norm() > tol * scale || herm.norm() > tol * scale) {
        throw PositivityError("projector must be idempotent and self-adjoint");
    }
    ranks_.resize(op_.slot_count());
    for (int s = 0; s < op_.slot_count(); ++s) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es((op_.block(s) + op_.block(s).adjoint()) * 0.5,
                                                           Eigen::EigenvaluesOnly);
        int r = 0;
        for (int i = 0; i < es.eigenvalues().size(); ++i) {
            if (es.eigenvalues()(i) > 0.5) ++r;
        }
        ranks_[s] = r;
    }
}

Projector Projector::identity(int m, int n) {
    return Projector(AdjointableOp::identity(m, n));
}

Projector Projector::coordinates(int m, int n, const std::vector<int>& coords) {
    Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(n, n);
    for (int i : coords) {
        if (i < 0 || i >= n) throw DimensionError("coordinate index out of range");
        block(i, i) = Complex(1.0, 0.0);
    }
    return Projector(AdjointableOp(std::vector<Eigen::MatrixXcd>(m, block)));
}

Projector Projector::complement() const {
    return Projector(AdjointableOp::identity(slot_count(), dim()) - op_);
}

Projector projector_from_generators(const std::vector<ModuleVector>& generators,
                                    double tol_rank) {
    if (generators.empty()) {
        throw DimensionError("projector_from_generators needs at least one generator");
    }
    const int m = generators.front().slot_count();
    const int n = generators.front().dim();
    for (const auto& g : generators) {
        if (g.slot_count() != m || g.dim() != n) {
            throw DimensionError("generators must share one module");
        }
    }
    std::vector<Eigen::MatrixXcd> blocks(m);
    for (int s = 0; s < m; ++s) {
        Eigen::MatrixXcd G(n, generators.size());
        for (size_t k = 0; k < generators.size(); ++k) G.col(static_cast<int>(k)) = generators[k].slot(s);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(G, Eigen::ComputeThinU);
        const auto& sv = svd.singularValues();
        double cutoff = (sv.size() > 0 ? sv(0) : 0.0) * tol_rank;
        int r = 0;
        for (int i = 0; i < sv.size(); ++i) {
            if (sv(i) > cutoff && sv(i) > 0.0) ++r;
        }
        if (r == 0) {
            // All-zero generators in this slot: project onto the zero submodule.
            blocks[s] = Eigen::MatrixXcd::Zero(n, n);
        } else {
            Eigen::MatrixXcd U = svd.matrixU().leftCols(r);
            blocks[s] = U * U.adjoint();
        }
    }
    return Projector(AdjointableOp(std::move(blocks)));
}

}  // namespace ccgf
