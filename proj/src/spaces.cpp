#include "pinchflow/spaces.hpp"

namespace pinchflow {

SpaceKind SpaceKind::grassmann(int n, int m) {
    if (n < 1 || m < 1) throw ValidationError("GrassmannI requires n >= 1, m >= 1");
    return {SpaceFamily::GrassmannI, n, m};
}

SpaceKind SpaceKind::skew(int n) {
    if (n < 2) throw ValidationError("SkewII requires n >= 2");
    return {SpaceFamily::SkewII, n, n};
}

SpaceKind SpaceKind::sym(int n) {
    if (n < 2) throw ValidationError("SymIII requires n >= 2");
    return {SpaceFamily::SymIII, n, n};
}

SpaceKind SpaceKind::quadric(int n) {
    if (n < 3) throw ValidationError("QuadricIV requires n >= 3");
    return {SpaceFamily::QuadricIV, n, n};
}

int SpaceKind::rows() const {
    switch (family) {
    case SpaceFamily::GrassmannI: return n;
    case SpaceFamily::SkewII:
    case SpaceFamily::SymIII: return n;
    case SpaceFamily::QuadricIV: return 1;
    }
    return 0;
}

int SpaceKind::cols() const {
    switch (family) {
    case SpaceFamily::GrassmannI: return m;
    case SpaceFamily::SkewII:
    case SpaceFamily::SymIII: return n;
    case SpaceFamily::QuadricIV: return n;
    }
    return 0;
}

int SpaceKind::complex_dim() const {
    switch (family) {
    case SpaceFamily::GrassmannI: return n * m;
    case SpaceFamily::SkewII: return n * (n - 1) / 2;
    case SpaceFamily::SymIII: return n * (n + 1) / 2;
    case SpaceFamily::QuadricIV: return n;
    }
    return 0;
}

std::string SpaceKind::name() const {
    switch (family) {
    case SpaceFamily::GrassmannI:
        return "G(" + std::to_string(n) + "," + std::to_string(n + m) + ";C)";
    case SpaceFamily::SkewII: return "G_II(" + std::to_string(n) + ")";
    case SpaceFamily::SymIII: return "G_III(" + std::to_string(n) + ")";
    case SpaceFamily::QuadricIV: return "Q_" + std::to_string(n);
    }
    return "?";
}

namespace {

void check_structure(const SpaceKind& space, const ComplexMatrix& m, bool imported) {
    if (m.rows() != space.rows() || m.cols() != space.cols())
        throw ValidationError("ShapeMismatch: tangent matrix is " + std::to_string(m.rows()) +
                              "x" + std::to_string(m.cols()) + " for " + space.name());
    const double tol = imported ? 1e-12 : 0.0;
    if (space.family == SpaceFamily::SkewII) {
        if (((m + m.transpose()).cwiseAbs().maxCoeff()) > tol)
            throw ValidationError("StructureViolation: SkewII tangent must satisfy T = -T'");
    } else if (space.family == SpaceFamily::SymIII) {
        if (((m - m.transpose()).cwiseAbs().maxCoeff()) > tol)
            throw ValidationError("StructureViolation: SymIII tangent must satisfy T = T'");
    }
}

} // namespace

TangentMatrix::TangentMatrix(const SpaceKind& space, const ComplexMatrix& entries, bool imported)
    : space_(space), m_(entries) {
    check_structure(space, m_, imported);
}

TangentMatrix TangentMatrix::unit(const SpaceKind& space, int k, int l) {
    ComplexMatrix m = ComplexMatrix::Zero(space.rows(), space.cols());
    switch (space.family) {
    case SpaceFamily::GrassmannI:
    case SpaceFamily::QuadricIV: m(k, l) = 1.0; break;
    case SpaceFamily::SkewII:
        if (k == l) throw ValidationError("StructureViolation: SkewII has no diagonal direction");
        m(k, l) = 1.0;
        m(l, k) = -1.0;
        break;
    case SpaceFamily::SymIII:
        m(k, l) = 1.0;
        m(l, k) = 1.0;
        break;
    }
    return TangentMatrix(space, m);
}

TangentMatrix TangentMatrix::times_i() const {
    return TangentMatrix(space_, std::complex<double>(0.0, 1.0) * m_);
}

double TangentMatrix::norm_sq_ambient() const {
    return m_.cwiseAbs2().sum();
}

ExactMatrix ExactMatrix::unit(const SpaceKind& space, int k, int l, bool imaginary) {
    ExactMatrix m = ExactMatrix::zero(space);
    RationalComplex one =
        imaginary ? RationalComplex::unit_i() : RationalComplex(Rational(1));
    switch (space.family) {
    case SpaceFamily::GrassmannI:
    case SpaceFamily::QuadricIV: m.at(k, l) = one; break;
    case SpaceFamily::SkewII:
        if (k == l) throw ValidationError("StructureViolation: SkewII has no diagonal direction");
        m.at(k, l) = one;
        m.at(l, k) = RationalComplex(-one.re, -one.im);
        break;
    case SpaceFamily::SymIII:
        m.at(k, l) = one;
        m.at(l, k) = one;
        break;
    }
    return m;
}

} // namespace pinchflow
