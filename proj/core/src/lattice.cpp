#include "toruskit/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace toruskit::lattice {

long long integer_determinant(const Eigen::MatrixXi& m) {
  const int n = static_cast<int>(m.rows());
  Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> a = m.cast<long long>();
  long long sign = 1, prev = 1;
  for (int i = 0; i < n - 1; ++i) {
    if (a(i, i) == 0) {
      int pivot = -1;
      for (int r = i + 1; r < n; ++r)
        if (a(r, i) != 0) { pivot = r; break; }
      if (pivot < 0) return 0;
      a.row(i).swap(a.row(pivot));
      sign = -sign;
    }
    for (int r = i + 1; r < n; ++r)
      for (int c = i + 1; c < n; ++c)
        a(r, c) = (a(r, c) * a(i, i) - a(r, i) * a(i, c)) / prev;
    prev = a(i, i);
  }
  return sign * a(n - 1, n - 1);
}

Eigen::MatrixXi unimodular_inverse(const Eigen::MatrixXi& A) {
  const int n = static_cast<int>(A.rows());
  const long long det = integer_determinant(A);
  if (det != 1 && det != -1)
    throw std::invalid_argument("unimodular_inverse: determinant is not +-1");
  Eigen::MatrixXi inv(n, n);
  Eigen::MatrixXi minor(n - 1, n - 1);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      for (int i = 0, mi = 0; i < n; ++i) {
        if (i == r) continue;
        for (int j = 0, mj = 0; j < n; ++j) {
          if (j == c) continue;
          minor(mi, mj++) = A(i, j);
        }
        ++mi;
      }
      const long long cof = (n == 1) ? 1 : integer_determinant(minor);
      // adjugate transposes the cofactor matrix
      inv(c, r) = static_cast<int>(((r + c) % 2 == 0 ? cof : -cof) * det);
    }
  return inv;
}

AveragedMetric averaged_metric(const FrequencySpectrum& spectrum,
                               const WavenumberLabeling& labeling, int p) {
  (void)p;  // the n-index drops out of k k^T
  const size_t count = std::min(labeling.labels.size(), spectrum.entries.size());
  if (count == 0) throw std::invalid_argument("averaged_metric: empty labeling");
  const int d = static_cast<int>(labeling.labels[0].k.size());

  AveragedMetric metric;
  metric.G = Eigen::MatrixXd::Zero(d, d);
  for (size_t j = 0; j < count; ++j) {
    const Eigen::VectorXd k = labeling.labels[j].k.cast<double>();
    const double m = spectrum.entries[j].mag;
    metric.G.noalias() += m * m * k * k.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(metric.G);
  metric.rank_warning =
      es.eigenvalues().minCoeff() < 1e-10 * metric.G.trace();
  return metric;
}

namespace {

// Canonical sign: first nonzero entry positive.
Eigen::VectorXi canonical_sign(Eigen::VectorXi k) {
  for (Eigen::Index i = 0; i < k.size(); ++i) {
    if (k[i] > 0) break;
    if (k[i] < 0) { k = -k; break; }
  }
  return k;
}

bool lex_less(const Eigen::VectorXi& a, const Eigen::VectorXi& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

// LLL reduction (delta = 0.99) of the column basis `basis`; `trans` is
// updated so basis_out = basis_in * trans.
void lll_reduce(Eigen::MatrixXd& basis, Eigen::MatrixXi& trans) {
  const Eigen::Index n = basis.cols();
  if (n <= 1) return;
  const double delta = 0.99;

  Eigen::MatrixXd bstar = basis;
  Eigen::MatrixXd mu = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd B(n);
  auto gram_schmidt = [&]() {
    for (Eigen::Index i = 0; i < n; ++i) {
      bstar.col(i) = basis.col(i);
      for (Eigen::Index j = 0; j < i; ++j) {
        mu(i, j) = basis.col(i).dot(bstar.col(j)) / B[j];
        bstar.col(i) -= mu(i, j) * bstar.col(j);
      }
      B[i] = bstar.col(i).squaredNorm();
    }
  };
  gram_schmidt();

  Eigen::Index k = 1;
  int guard = 0;
  while (k < n && ++guard < 100000) {
    for (Eigen::Index j = k - 1; j >= 0; --j) {
      const long long q = std::llround(mu(k, j));
      if (q != 0) {
        basis.col(k) -= static_cast<double>(q) * basis.col(j);
        trans.col(k) -= static_cast<int>(q) * trans.col(j);
      }
    }
    gram_schmidt();
    if (B[k] >= (delta - mu(k, k - 1) * mu(k, k - 1)) * B[k - 1]) {
      ++k;
    } else {
      basis.col(k).swap(basis.col(k - 1));
      trans.col(k).swap(trans.col(k - 1));
      gram_schmidt();
      k = std::max<Eigen::Index>(k - 1, 1);
    }
  }
}

// Exact enumeration of the nonzero integer vector x minimizing ||R x|| for
// upper-triangular R with positive diagonal. `report` receives every
// candidate whose squared norm is within tol of the current best.
template <typename Report>
void enumerate_sphere(const Eigen::MatrixXd& R, double radius2,
                      long long node_budget, Report&& report) {
  const Eigen::Index n = R.cols();
  Eigen::VectorXi x = Eigen::VectorXi::Zero(n);
  Eigen::VectorXd partial = Eigen::VectorXd::Zero(n + 1);  // cost above level i
  Eigen::VectorXd center(n);
  Eigen::VectorXi xmax(n);
  long long nodes = 0;
  double bound = radius2;

  Eigen::Index i = n - 1;
  bool descending = true;
  while (true) {
    if (descending) {
      // enter level i: compute admissible range for x[i]
      double s = 0.0;
      for (Eigen::Index j = i + 1; j < n; ++j) s += R(i, j) * x[j];
      center[i] = s;
      const double room = std::max(bound - partial[i + 1], 0.0);
      const double half = std::sqrt(room) / R(i, i);
      const double c = -s / R(i, i);
      x[i] = static_cast<int>(std::ceil(c - half - 1e-12));
      xmax[i] = static_cast<int>(std::floor(c + half + 1e-12));
      descending = false;
    } else {
      ++x[i];
    }
    if (x[i] > xmax[i]) {
      ++i;
      if (i >= n) return;
      continue;
    }
    if (++nodes > node_budget)
      throw std::runtime_error("lattice enumeration exceeded node budget");
    const double t = R(i, i) * x[i] + center[i];
    const double cost = partial[i + 1] + t * t;
    if (cost > bound + 1e-12) continue;
    if (i == 0) {
      bool zero = true;
      for (Eigen::Index j = 0; j < n; ++j)
        if (x[j] != 0) { zero = false; break; }
      if (!zero) {
        const double new_bound = report(x, cost);
        bound = std::min(bound, new_bound);
      }
    } else {
      partial[i] = cost;
      --i;
      descending = true;
    }
  }
}

Eigen::MatrixXd cholesky_upper(const Eigen::MatrixXd& G) {
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("lattice: Gram matrix is not positive definite");
  return Eigen::MatrixXd(llt.matrixU());
}

// Shortest nonzero coefficient vector of the lattice spanned by the columns
// of `basis`, with ties broken lexicographically on U * x.
Eigen::VectorXi shortest_in_basis(const Eigen::MatrixXd& basis,
                                  const Eigen::MatrixXi& U,
                                  long long node_budget) {
  Eigen::MatrixXd b = basis;
  Eigen::MatrixXi t = Eigen::MatrixXi::Identity(basis.cols(), basis.cols());
  lll_reduce(b, t);

  double radius2 = b.colwise().squaredNorm().minCoeff() * (1.0 + 1e-9);
  const Eigen::MatrixXd R = cholesky_upper(b.transpose() * b);

  const double tol = 1e-9 * radius2;
  double best = radius2;
  bool found = false;
  Eigen::VectorXi best_k;
  enumerate_sphere(R, radius2, node_budget,
                   [&](const Eigen::VectorXi& x, double cost) {
                     Eigen::VectorXi k = canonical_sign(U * (t * x));
                     if (!found || cost < best - tol ||
                         (cost <= best + tol && lex_less(k, best_k))) {
                       if (cost < best) best = cost;
                       best_k = k;
                       found = true;
                     }
                     return best + tol;
                   });
  if (!found) throw std::runtime_error("lattice enumeration found no vector");
  return best_k;
}

// Extend the primitive integer vector x to a unimodular matrix whose first
// column is x (Euclidean elimination with tracked inverse operations).
Eigen::MatrixXi complete_to_unimodular(const Eigen::VectorXi& x) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXi M = Eigen::MatrixXi::Identity(n, n);
  Eigen::VectorXi v = x;

  while (true) {
    Eigen::Index piv = -1;
    int nonzero = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (v[i] == 0) continue;
      ++nonzero;
      if (piv < 0 || std::abs(v[i]) < std::abs(v[piv])) piv = i;
    }
    if (piv < 0) throw std::invalid_argument("complete_to_unimodular: zero vector");
    if (nonzero == 1) {
      if (std::abs(v[piv]) != 1)
        throw std::invalid_argument("complete_to_unimodular: vector not primitive");
      // move to slot 0 with positive sign; mirror as inverse column ops on M
      if (piv != 0) {
        std::swap(v[0], v[piv]);
        M.col(0).swap(M.col(piv));
      }
      if (v[0] < 0) {
        v[0] = -v[0];
        M.col(0) = -M.col(0);
      }
      return M;  // M * e1 = x
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == piv || v[j] == 0) continue;
      const int q = static_cast<int>(v[j] / v[piv]);
      v[j] -= q * v[piv];
      M.col(piv) += q * M.col(j);
    }
  }
}

struct GramSchmidt {
  Eigen::MatrixXd bstar;
  Eigen::MatrixXd mu;
  Eigen::VectorXd B;
};

GramSchmidt gram_schmidt(const Eigen::MatrixXd& basis) {
  const Eigen::Index n = basis.cols();
  GramSchmidt gs;
  gs.bstar = basis;
  gs.mu = Eigen::MatrixXd::Identity(n, n);
  gs.B.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      gs.mu(i, j) = basis.col(i).dot(gs.bstar.col(j)) / gs.B[j];
      gs.bstar.col(i) -= gs.mu(i, j) * gs.bstar.col(j);
    }
    gs.B[i] = gs.bstar.col(i).squaredNorm();
  }
  return gs;
}

}  // namespace

Eigen::VectorXi shortest_lattice_vector(const Eigen::MatrixXd& B,
                                        long long node_budget) {
  if (B.rows() != B.cols())
    throw std::invalid_argument("shortest_lattice_vector: B must be square");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
  const double smin = svd.singularValues().minCoeff();
  if (smin <= 0.0 || svd.singularValues().maxCoeff() / smin > 1e12)
    throw std::runtime_error("shortest_lattice_vector: basis is near-singular");
  return shortest_in_basis(
      B, Eigen::MatrixXi::Identity(B.cols(), B.cols()), node_budget);
}

UnimodularTransform kz_reduce(const AveragedMetric& metric,
                              long long node_budget) {
  const Eigen::Index d = metric.G.rows();
  Eigen::MatrixXd G = 0.5 * (metric.G + metric.G.transpose());
  if (G.rows() != G.cols() || d < 1)
    throw std::invalid_argument("kz_reduce: G must be square and nonempty");
  if ((metric.G - metric.G.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + G.norm()))
    throw std::invalid_argument("kz_reduce: G must be symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  if (es.eigenvalues().minCoeff() < -1e-10 * G.trace())
    throw std::invalid_argument("kz_reduce: G must be positive semidefinite");
  if (es.eigenvalues().minCoeff() <= 1e-12 * G.trace())
    G += (1e-12 * G.trace() / static_cast<double>(d)) *
         Eigen::MatrixXd::Identity(d, d);

  // Triangular square root: G = B^T B.
  Eigen::MatrixXd B;
  {
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() == Eigen::Success) {
      B = Eigen::MatrixXd(llt.matrixU());
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(G);
      B = es2.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
          es2.eigenvectors().transpose();
    }
  }

  Eigen::MatrixXd basis = B;  // columns = current lattice basis
  Eigen::MatrixXi T = Eigen::MatrixXi::Identity(d, d);  // basis = B * T

  for (Eigen::Index n = 0; n < d; ++n) {
    const auto gs = gram_schmidt(basis);
    // Projected lattice: coordinates of columns n..d-1 in the orthonormal
    // Gram-Schmidt frame restricted to levels >= n form an upper-triangular
    // generator matrix.
    const Eigen::Index m = d - n;
    Eigen::MatrixXd Rproj = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index c = 0; c < m; ++c)
      for (Eigen::Index r = 0; r <= c; ++r)
        Rproj(r, c) = gs.mu(n + c, n + r) * std::sqrt(gs.B[n + r]);
    const Eigen::VectorXi x = shortest_in_basis(
        Rproj, Eigen::MatrixXi::Identity(m, m), node_budget);
    const Eigen::MatrixXi M = complete_to_unimodular(x);
    basis.rightCols(m) = (basis.rightCols(m) * M.cast<double>()).eval();
    T.rightCols(m) = (T.rightCols(m) * M).eval();
  }

  // Size reduction: |mu_mn| <= 1/2 via integer column operations (the
  // Gram-Schmidt vectors are untouched).
  for (Eigen::Index i = 1; i < d; ++i) {
    for (Eigen::Index j = i - 1; j >= 0; --j) {
      const long long q = std::llround(gram_schmidt(basis).mu(i, j));
      if (q != 0) {
        basis.col(i) -= static_cast<double>(q) * basis.col(j);
        T.col(i) -= static_cast<int>(q) * T.col(j);
      }
    }
  }

  // Post-hoc certificate: each Gram-Schmidt vector is shortest in its
  // projected lattice and all coefficients are size-reduced.
  {
    const auto gs = gram_schmidt(basis);
    for (Eigen::Index n = 0; n < d; ++n) {
      for (Eigen::Index j = 0; j < n; ++j)
        if (std::abs(gs.mu(n, j)) > 0.5 + 1e-10)
          throw std::runtime_error("kz_reduce: size-reduction certificate failed");
      const Eigen::Index m = d - n;
      Eigen::MatrixXd Rproj = Eigen::MatrixXd::Zero(m, m);
      for (Eigen::Index c = 0; c < m; ++c)
        for (Eigen::Index r = 0; r <= c; ++r)
          Rproj(r, c) = gs.mu(n + c, n + r) * std::sqrt(gs.B[n + r]);
      const Eigen::VectorXi x = shortest_in_basis(
          Rproj, Eigen::MatrixXi::Identity(m, m), node_budget);
      double shortest2 = 0.0;
      {
        Eigen::VectorXd v = Rproj * x.cast<double>();
        shortest2 = v.squaredNorm();
      }
      if (gs.B[n] > shortest2 * (1.0 + 1e-9))
        throw std::runtime_error("kz_reduce: shortest-vector certificate failed");
    }
  }

  // Reproducible output: sign-normalize each generator. The column order is
  // the reduction's stage order (shortest vector first); reordering by length
  // could break the stagewise-shortest property, so it is left untouched.
  Eigen::MatrixXi Tcanon(d, d);
  for (Eigen::Index i = 0; i < d; ++i) Tcanon.col(i) = canonical_sign(T.col(i));

  UnimodularTransform out;
  out.A = unimodular_inverse(Tcanon);
  const long long det = integer_determinant(out.A);
  if (det != 1 && det != -1)
    throw std::runtime_error("kz_reduce: transform lost unimodularity");
  return out;
}

std::pair<UnimodularTransform, Eigen::VectorXd> canonicalize_rotation(
    const UnimodularTransform& A, const Eigen::VectorXd& omega) {
  const long long det = integer_determinant(A.A);
  if (det != 1 && det != -1)
    throw std::invalid_argument("canonicalize_rotation: |det A| must be 1");

  UnimodularTransform out = A;
  Eigen::VectorXd w = A.A.cast<double>() * omega;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    w[i] -= std::floor(w[i]);
    if (w[i] > 0.5) {
      w[i] = 1.0 - w[i];
      out.A.row(i) = -out.A.row(i);
    }
  }
  return {out, w};
}

}  // namespace toruskit::lattice
