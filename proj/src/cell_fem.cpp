#include "stripwave/cell_fem.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace stripwave::cell {

namespace {

constexpr double kPi = 3.14159265358979323846;

// nodes strictly after `a`, geometric growth from h0 until the uniform
// target H takes over; last node lands exactly on `b`
std::vector<double> graded_line(double a, double b, double h0, double H,
                                double growth) {
  std::vector<double> out;
  double pos = a;
  double h = h0;
  while (h < H && pos + 2.0 * h < b) {
    pos += h;
    out.push_back(pos);
    h *= growth;
  }
  const double remaining = b - pos;
  const int m = std::max(1, static_cast<int>(std::ceil(remaining / H - 1e-9)));
  for (int i = 1; i < m; ++i) out.push_back(pos + remaining * i / m);
  out.push_back(b);
  return out;
}

}  // namespace

CellMesh CellMesh::refined() const {
  CellMesh fine = *this;
  fine.level = level + 1;
  fine.y.clear();
  fine.x.clear();
  for (size_t i = 0; i + 1 < y.size(); ++i) {
    fine.y.push_back(y[i]);
    fine.y.push_back(0.5 * (y[i] + y[i + 1]));
  }
  fine.y.push_back(y.back());
  for (size_t i = 0; i + 1 < x.size(); ++i) {
    fine.x.push_back(x[i]);
    fine.x.push_back(0.5 * (x[i] + x[i + 1]));
  }
  fine.x.push_back(x.back());
  return fine;
}

double CellMesh::min_spacing() const {
  double m = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i + 1 < y.size(); ++i) m = std::min(m, y[i + 1] - y[i]);
  for (size_t i = 0; i + 1 < x.size(); ++i) m = std::min(m, x[i + 1] - x[i]);
  return m;
}

CellMesh build_mesh(const CellConfig& cfg) {
  if (cfg.base_div < 8) throw config_error("build_mesh: base_div >= 8");
  if (!(cfg.grade_ratio >= 0.3 && cfg.grade_ratio <= 0.8))
    throw config_error("build_mesh: grade_ratio in [0.3, 0.8]");
  CellMesh mesh;
  mesh.full_dirichlet = cfg.full_dirichlet;
  mesh.neumann_bottom = cfg.neumann_bottom;
  const double H = kPi / (2.0 * cfg.base_div);
  if (cfg.full_dirichlet || cfg.neumann_bottom ||
      cfg.ln_eta >= std::log(kPi / 2.0)) {
    // no window scale to resolve: uniform tensor mesh
    if (cfg.ln_eta >= std::log(kPi / 2.0)) mesh.full_dirichlet = true;
    mesh.eta = mesh.full_dirichlet ? kPi / 2.0 : 0.0;
    const int ny = 2 * cfg.base_div, nx = 2 * cfg.base_div;
    for (int i = 0; i <= ny; ++i) mesh.y.push_back(-kPi / 2.0 + kPi * i / ny);
    for (int i = 0; i <= nx; ++i) mesh.x.push_back(kPi * i / nx);
    return mesh;
  }
  const double eta = std::exp(cfg.ln_eta);
  if (!(eta > 0.0))
    throw config_error("build_mesh: eta underflows double precision");
  mesh.eta = eta;
  const double growth = 1.0 / cfg.grade_ratio;
  // half line [0, pi/2]: 2 window cells then geometric layers
  std::vector<double> half = {0.0, 0.5 * eta, eta};
  for (double v : graded_line(eta, kPi / 2.0, eta, H, growth)) half.push_back(v);
  for (size_t i = half.size(); i-- > 1;) mesh.y.push_back(-half[i]);
  for (double v : half) mesh.y.push_back(v);
  // x2 line: geometric layers from the junction scale eps*eta up to uniform
  const double h0x = std::max(0.25 * cfg.epsilon * eta, 1e-12);
  mesh.x.push_back(0.0);
  for (double v : graded_line(0.0, kPi, h0x, H, growth)) mesh.x.push_back(v);
  return mesh;
}

namespace {

struct Mats1D {
  Eigen::SparseMatrix<double> mass, stiff, skew;  // skew: (u, v') - (u', v)
  std::vector<double> weight;                     // integral of each hat
};

Mats1D line_matrices(const std::vector<double>& nodes, bool periodic) {
  const int n_nodes = static_cast<int>(nodes.size());
  const int n = periodic ? n_nodes - 1 : n_nodes;
  std::vector<Eigen::Triplet<double>> tm, tk, ts;
  std::vector<double> w(n, 0.0);
  for (int e = 0; e + 1 < n_nodes; ++e) {
    const int i0 = e % n;
    const int i1 = (e + 1) % n;
    const double h = nodes[e + 1] - nodes[e];
    tm.emplace_back(i0, i0, h / 3.0);
    tm.emplace_back(i1, i1, h / 3.0);
    tm.emplace_back(i0, i1, h / 6.0);
    tm.emplace_back(i1, i0, h / 6.0);
    tk.emplace_back(i0, i0, 1.0 / h);
    tk.emplace_back(i1, i1, 1.0 / h);
    tk.emplace_back(i0, i1, -1.0 / h);
    tk.emplace_back(i1, i0, -1.0 / h);
    ts.emplace_back(i0, i1, -1.0);
    ts.emplace_back(i1, i0, 1.0);
    w[i0] += 0.5 * h;
    w[i1] += 0.5 * h;
  }
  Mats1D out;
  out.mass.resize(n, n);
  out.stiff.resize(n, n);
  out.skew.resize(n, n);
  out.mass.setFromTriplets(tm.begin(), tm.end());
  out.stiff.setFromTriplets(tk.begin(), tk.end());
  out.skew.setFromTriplets(ts.begin(), ts.end());
  out.weight = std::move(w);
  return out;
}

// tensor product Ay (x) Bx restricted to the free dofs
SpMatD kron_free(const SpMatD& Ay, const SpMatD& Bx, const CellSystem& sys) {
  std::vector<Eigen::Triplet<double>> t;
  for (int a = 0; a < Ay.outerSize(); ++a)
    for (SpMatD::InnerIterator ita(Ay, a); ita; ++ita)
      for (int c = 0; c < Bx.outerSize(); ++c)
        for (SpMatD::InnerIterator itb(Bx, c); itb; ++itb) {
          const int r = sys.dof_at(static_cast<int>(ita.row()), static_cast<int>(itb.row()));
          const int s = sys.dof_at(static_cast<int>(ita.col()), static_cast<int>(itb.col()));
          if (r >= 0 && s >= 0) t.emplace_back(r, s, ita.value() * itb.value());
        }
  SpMatD out(sys.n_dof, sys.n_dof);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

}  // namespace

CellSystem assemble(const CellMesh& mesh, const CellConfig& cfg) {
  CellSystem sys;
  sys.epsilon = cfg.epsilon;
  sys.tau = cfg.tau;
  sys.kappa = cfg.kappa;
  sys.dense_threshold = cfg.dense_threshold;
  sys.lanczos_max = cfg.lanczos_max;
  sys.eig_tol = cfg.eig_residual_tol;
  sys.mesh = mesh;
  if (!(cfg.epsilon > 0.0)) throw config_error("assemble: epsilon > 0");
  if (!(std::abs(cfg.tau) <= 1.0 - cfg.kappa))
    throw config_error("assemble: |tau| <= 1 - kappa required");

  const Mats1D ym = line_matrices(mesh.y, /*periodic=*/true);
  const Mats1D xm = line_matrices(mesh.x, /*periodic=*/false);
  sys.n_yu = static_cast<int>(mesh.y.size()) - 1;
  sys.n_xn = static_cast<int>(mesh.x.size());
  sys.y_weight = ym.weight;

  // Dirichlet: whole top row; bottom nodes inside the window
  sys.dof.assign(static_cast<size_t>(sys.n_yu) * sys.n_xn, -1);
  int next = 0;
  for (int iy = 0; iy < sys.n_yu; ++iy)
    for (int ix = 0; ix < sys.n_xn; ++ix) {
      if (ix == sys.n_xn - 1) continue;  // x2 = pi
      if (ix == 0) {
        if (mesh.full_dirichlet) continue;
        if (!mesh.neumann_bottom &&
            std::abs(mesh.y[iy]) <= mesh.eta * (1.0 + 1e-12))
          continue;
      }
      sys.dof[static_cast<size_t>(iy) * sys.n_xn + ix] = next++;
    }
  sys.n_dof = next;
  if (sys.n_dof == 0) throw config_error("assemble: no free dofs");
  sys.node_y1.resize(sys.n_dof);
  sys.node_x2.resize(sys.n_dof);
  for (int iy = 0; iy < sys.n_yu; ++iy)
    for (int ix = 0; ix < sys.n_xn; ++ix) {
      const int d = sys.dof_at(iy, ix);
      if (d >= 0) {
        sys.node_y1[d] = mesh.y[iy];
        sys.node_x2[d] = mesh.x[ix];
      }
    }
  sys.eta_effective = mesh.eta;
  sys.mu_effective =
      (mesh.eta > 0.0 && mesh.eta < 1.0 && !mesh.full_dirichlet && !mesh.neumann_bottom)
          ? -1.0 / (cfg.epsilon * std::log(mesh.eta))
          : 0.0;

  sys.K1 = kron_free(ym.stiff, xm.mass, sys);
  sys.K2 = kron_free(ym.mass, xm.stiff, sys);
  sys.M = kron_free(ym.mass, xm.mass, sys);
  sys.S = kron_free(ym.skew, xm.mass, sys);
  return sys;
}

SpMatD CellSystem::stiffness_real() const {
  if (tau != 0.0) throw config_error("stiffness_real: tau must be 0");
  const double ie2 = 1.0 / (epsilon * epsilon);
  return SpMatD(physical ? SpMatD(K1 + K2) : SpMatD(ie2 * K1 + K2));
}

SpMatC CellSystem::stiffness() const {
  const double ie2 = 1.0 / (epsilon * epsilon);
  const double s_coef = physical ? tau / epsilon : tau * ie2;
  SpMatD real_part = (physical ? SpMatD(K1 + K2) : SpMatD(ie2 * K1 + K2)) +
                     (tau * tau * ie2) * M;
  SpMatC out = real_part.cast<cplx>();
  if (tau != 0.0) out += (cplx(0.0, 1.0) * s_coef) * S.cast<cplx>();
  return out;
}

Eigen::VectorXd CellSystem::nodal(const std::function<double(double, double)>& f) const {
  Eigen::VectorXd v(n_dof);
  for (int d = 0; d < n_dof; ++d) v[d] = f(node_y1[d], node_x2[d]);
  return v;
}

Eigen::VectorXd CellSystem::profile(const std::function<double(double)>& f) const {
  return nodal([&](double, double x2) { return f(x2); });
}

namespace {

double quad_form(const SpMatD& Q, const Eigen::VectorXcd& u) {
  const Eigen::VectorXd ur = u.real(), ui = u.imag();
  return ur.dot(Q * ur) + ui.dot(Q * ui);
}

cplx dot_form(const SpMatD& Q, const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  const Eigen::VectorXd br = b.real(), bi = b.imag();
  const Eigen::VectorXd Qbr = Q * br, Qbi = Q * bi;
  return {a.real().dot(Qbr) + a.imag().dot(Qbi),
          a.real().dot(Qbi) - a.imag().dot(Qbr)};
}

}  // namespace

double CellSystem::norm_M(const Eigen::VectorXcd& u) const {
  return std::sqrt(std::max(0.0, quad_form(M, u)));
}
double CellSystem::norm_dx2(const Eigen::VectorXcd& u) const {
  return std::sqrt(std::max(0.0, quad_form(K2, u)));
}
double CellSystem::norm_dx1(const Eigen::VectorXcd& u) const {
  const double sc = physical ? 1.0 : 1.0 / epsilon;
  return std::sqrt(std::max(0.0, quad_form(K1, u))) * sc;
}

void CellSystem::remove_y_mean(Eigen::VectorXcd& u) const {
  if (physical)
    throw config_error("remove_y_mean: supported on the tensor backend only");
  for (int ix = 0; ix < n_xn; ++ix) {
    double wsum = 0.0;
    cplx acc(0.0, 0.0);
    for (int iy = 0; iy < n_yu; ++iy) {
      const int d = dof_at(iy, ix);
      if (d < 0) continue;
      wsum += y_weight[iy];
      acc += y_weight[iy] * u[d];
    }
    if (wsum == 0.0) continue;
    const cplx c = acc / wsum;
    for (int iy = 0; iy < n_yu; ++iy) {
      const int d = dof_at(iy, ix);
      if (d >= 0) u[d] -= c;
    }
  }
}

// ---------------------------------------------------------------------------
// eigensolvers

namespace {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// factorization wrapper: LDLT for the definite shifted matrix, LU fallback.
// The tensor meshes pair window-width cells with far-field cells, which blows
// the raw matrix scale up to ~1/(eps*eta); a symmetric Jacobi rescaling to
// unit diagonal removes this structural ill-conditioning before factorizing.
template <typename Scalar>
struct ShiftedSolver {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<Scalar>> ldlt;
  Eigen::SparseLU<Eigen::SparseMatrix<Scalar>> lu;
  Vec<Scalar> ds;
  bool use_lu = false;

  explicit ShiftedSolver(const Eigen::SparseMatrix<Scalar>& C) {
    ds.resize(C.rows());
    const Vec<Scalar> diag = C.diagonal();
    for (int i = 0; i < C.rows(); ++i) {
      const double a = std::abs(std::complex<double>(diag[i]));
      ds[i] = Scalar((a > 0.0) ? 1.0 / std::sqrt(a) : 1.0);
    }
    Eigen::SparseMatrix<Scalar> Cs = C;
    for (int c = 0; c < Cs.outerSize(); ++c)
      for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(Cs, c); it; ++it)
        it.valueRef() *= ds[it.row()] * ds[it.col()];
    ldlt.compute(Cs);
    if (ldlt.info() != Eigen::Success) {
      use_lu = true;
      Cs.makeCompressed();
      lu.compute(Cs);
      if (lu.info() != Eigen::Success)
        throw std::runtime_error("cell eigensolver: factorization breakdown");
    }
  }
  Vec<Scalar> solve(const Vec<Scalar>& b) const {
    const Vec<Scalar> bs = ds.asDiagonal() * b;
    Vec<Scalar> x;
    if (use_lu)
      x = lu.solve(bs);
    else
      x = ldlt.solve(bs);
    return ds.asDiagonal() * x;
  }
};

// symmetric diagonal scaling D = diag(M)^{-1/2}; the graded meshes carry
// element scales spanning many orders of magnitude and the factorizations
// lose accuracy without it
Eigen::VectorXd mass_scaling(const SpMatD& M) {
  Eigen::VectorXd d = M.diagonal();
  for (int i = 0; i < d.size(); ++i) d[i] = 1.0 / std::sqrt(d[i]);
  return d;
}

template <typename Scalar>
Eigen::SparseMatrix<Scalar> scaled(const Eigen::SparseMatrix<Scalar>& A,
                                   const Eigen::VectorXd& d) {
  Eigen::SparseMatrix<Scalar> out = A;
  for (int c = 0; c < out.outerSize(); ++c)
    for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(out, c); it; ++it)
      it.valueRef() *= d[it.row()] * d[it.col()];
  return out;
}

// normalize a Ritz vector in the mass inner product and report the residual
// together with its double-precision evaluation floor: on deeply graded
// meshes ||A|| is so large that even computing A*v carries rounding noise of
// size eps*|A||v|, which bounds any attainable 2-norm residual
struct PairCheck {
  double residual;
  double floor;
};

PairCheck finalize_pair(const SpMatC& A0, const SpMatC& M0, double lam,
                        const Eigen::VectorXcd& y, Eigen::VectorXcd& v_out) {
  Eigen::VectorXcd v = y;
  Eigen::VectorXcd mv = M0 * v;
  const double n2 = std::abs(std::real(cplx(v.adjoint() * mv)));
  v /= std::sqrt(n2);
  mv = M0 * v;
  PairCheck chk;
  chk.residual = (A0 * v - cplx(lam, 0.0) * mv).norm() / mv.norm();
  const Eigen::VectorXd va = v.cwiseAbs();
  const Eigen::VectorXd noise =
      SpMatD(A0.cwiseAbs()) * va + std::abs(lam) * (SpMatD(M0.cwiseAbs()) * va);
  chk.floor = 50.0 * std::numeric_limits<double>::epsilon() * noise.norm() / mv.norm();
  v_out = v;
  return chk;
}

template <typename Scalar>
void lanczos_shift_invert(const Eigen::SparseMatrix<Scalar>& A,
                          const Eigen::SparseMatrix<Scalar>& M, int k,
                          double sigma, int max_steps, double tol,
                          const SpMatC& A0, const SpMatC& M0,
                          SpectralResult& out) {
  const int n = static_cast<int>(A.rows());
  Eigen::SparseMatrix<Scalar> C = A - Scalar(sigma) * M;
  ShiftedSolver<Scalar> solver(C);

  const auto m_dot = [&](const Vec<Scalar>& a, const Vec<Scalar>& b) -> Scalar {
    return a.adjoint() * (M * b);
  };

  std::vector<Vec<Scalar>> Q;
  std::vector<double> alpha, beta;
  double best_worst_res = std::numeric_limits<double>::infinity();
  int stagnant_checks = 0;
  // deterministic pseudo-random start vector
  Vec<Scalar> v(n);
  unsigned long state = 0x9e3779b97f4a7c15ull;
  for (int i = 0; i < n; ++i) {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    v[i] = Scalar(1.0 + 1e-3 * static_cast<double>((state >> 33) % 1000));
  }
  v /= std::sqrt(std::abs(m_dot(v, v)));
  Q.push_back(v);

  const int m_cap = std::min(max_steps, n);
  for (int j = 0; j < m_cap; ++j) {
    Vec<Scalar> w = solver.solve(M * Q[j]);
    if (j > 0) w -= Scalar(beta[j - 1]) * Q[j - 1];
    const double a = std::real(std::complex<double>(m_dot(w, Q[j])));
    w -= Scalar(a) * Q[j];
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : Q) w -= m_dot(q, w) * q;
    alpha.push_back(a);
    double b = std::sqrt(std::abs(std::real(std::complex<double>(m_dot(w, w)))));
    const bool breakdown = b < 1e-13;
    if (!breakdown) {
      beta.push_back(b);
      Q.push_back(w / Scalar(b));
    }

    const int m = static_cast<int>(alpha.size());
    if (m >= std::min(2 * k + 6, m_cap) && (m % 10 == 0 || breakdown || m == m_cap)) {
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
      for (int i = 0; i < m; ++i) {
        T(i, i) = alpha[i];
        if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> te(T);
      // largest nu <-> eigenvalues nearest above sigma
      std::vector<int> order(m);
      for (int i = 0; i < m; ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](int p, int q) {
        return te.eigenvalues()[p] > te.eigenvalues()[q];
      });
      const int kk = std::min(k, m);
      std::vector<double> lam(kk);
      Eigen::MatrixXcd vecs(n, kk);
      std::vector<double> res(kk);
      bool good = true;
      double worst = 0.0;
      for (int i = 0; i < kk; ++i) {
        const double nu = te.eigenvalues()[order[i]];
        if (!(nu > 0.0)) {
          good = false;
          break;
        }
        lam[i] = sigma + 1.0 / nu;
        Vec<Scalar> y = Vec<Scalar>::Zero(n);
        for (int p = 0; p < m; ++p) y += Scalar(te.eigenvectors()(p, order[i])) * Q[p];
        Eigen::VectorXcd v;
        const PairCheck chk = finalize_pair(A0, M0, lam[i], y.template cast<cplx>(), v);
        res[i] = chk.residual;
        vecs.col(i) = v;
        worst = std::max(worst, chk.residual / std::max(tol, chk.floor));
      }
      if (good && worst > 1.0) {
        // the subspace is converged once the residual stops improving; on
        // deeply graded meshes it stagnates at the evaluation noise level
        if (worst > 0.9 * best_worst_res)
          ++stagnant_checks;
        else
          stagnant_checks = 0;
        best_worst_res = std::min(best_worst_res, worst);
        if (stagnant_checks < 2 || worst > 50.0) good = false;
      }
      if (good && kk == k) {
        out.eigenvalues = lam;
        out.vectors = vecs;
        out.residuals = res;
        return;
      }
      if (breakdown || m == m_cap) {
        if (good && kk > 0) {
          out.eigenvalues = lam;
          out.vectors = vecs;
          out.residuals = res;
          return;
        }
        throw std::runtime_error(
            "cell eigensolver: Lanczos did not converge in " + std::to_string(m) +
            " steps");
      }
    }
    if (breakdown) break;
  }
  throw std::runtime_error("cell eigensolver: Lanczos did not converge");
}

// dense path runs on the diagonally rescaled pencil so that the Cholesky of
// the mass matrix stays well conditioned; vectors are mapped back afterwards
template <typename Mat>
void dense_gen_eig(const Mat& A, const Mat& M, int k, const Eigen::VectorXd& d,
                   const SpMatC& A0, const SpMatC& M0, SpectralResult& out) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(A, M,
                                                    Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (ges.info() != Eigen::Success)
    throw std::runtime_error("cell eigensolver: dense solve failed");
  const int n = static_cast<int>(A.rows());
  const int kk = std::min(k, n);
  out.eigenvalues.assign(ges.eigenvalues().data(), ges.eigenvalues().data() + kk);
  out.vectors.resize(n, kk);
  out.residuals.resize(kk);
  for (int i = 0; i < kk; ++i) {
    Eigen::VectorXcd v;
    const Eigen::VectorXcd y =
        d.cast<cplx>().asDiagonal() * ges.eigenvectors().col(i).template cast<cplx>();
    out.residuals[i] = finalize_pair(A0, M0, out.eigenvalues[i], y, v).residual;
    out.vectors.col(i) = v;
  }
}

}  // namespace

SpectralResult solve_eigs(const CellSystem& sys, int k, double shift_hint) {
  if (k < 1) throw std::domain_error("solve_eigs: k >= 1");
  if (k > sys.n_dof / 4 && sys.n_dof > 8)
    throw std::domain_error("solve_eigs: k too large for this mesh");
  SpectralResult out;
  out.mesh_level = sys.mesh.level;
  out.dof_count = sys.n_dof;
  const double ie2 = 1.0 / (sys.epsilon * sys.epsilon);
  const double sigma =
      (shift_hint > 0.0) ? shift_hint : sys.tau * sys.tau * ie2 + 0.2;
  const Eigen::VectorXd d = mass_scaling(sys.M);
  const SpMatC A0 = sys.stiffness();
  const SpMatC M0 = sys.M.cast<cplx>();
  // the dense transform loses eigenvalues to rounding once the rescaled
  // stiffness norm is extreme (deep grading); fall back to shift-invert then
  double ratio_max = 0.0;
  {
    const Eigen::VectorXd ka = sys.K1.diagonal() + sys.K2.diagonal();
    const Eigen::VectorXd ma = sys.M.diagonal();
    for (int i = 0; i < sys.n_dof; ++i) ratio_max = std::max(ratio_max, ka[i] / ma[i]);
  }
  const bool dense_ok = sys.n_dof <= sys.dense_threshold && ratio_max < 1e9;
  if (sys.tau == 0.0) {
    const SpMatD A = sys.stiffness_real();
    if (dense_ok) {
      dense_gen_eig(Eigen::MatrixXd(scaled(A, d)), Eigen::MatrixXd(scaled(sys.M, d)),
                    k, d, A0, M0, out);
    } else {
      lanczos_shift_invert<double>(A, sys.M, k, sigma, sys.lanczos_max, sys.eig_tol,
                                   A0, M0, out);
    }
  } else {
    if (dense_ok) {
      dense_gen_eig(Eigen::MatrixXcd(scaled(A0, d)), Eigen::MatrixXcd(scaled(M0, d)),
                    k, d, A0, M0, out);
    } else {
      lanczos_shift_invert<cplx>(A0, M0, k, sigma, sys.lanczos_max, sys.eig_tol,
                                 A0, M0, out);
    }
  }
  return out;
}


// ---------------------------------------------------------------------------
// dyadic window patch backend

namespace {

struct NodeKey {
  long a, b;
  bool operator==(const NodeKey& o) const { return a == o.a && b == o.b; }
};
struct NodeKeyHash {
  size_t operator()(const NodeKey& k) const {
    return std::hash<long>()(k.a * 0x9e3779b97f4a7c15LL + k.b);
  }
};
struct CellKey {
  int level;
  long ix, iy;
  bool operator==(const CellKey& o) const {
    return level == o.level && ix == o.ix && iy == o.iy;
  }
};
struct CellKeyHash {
  size_t operator()(const CellKey& k) const {
    return std::hash<long>()((k.ix * 40503LL + k.iy) * 64 + k.level);
  }
};

}  // namespace

PatchMesh PatchMesh::refined() const {
  PatchMesh f = *this;
  f.refinements = refinements + 1;
  f.max_level = max_level + 1;
  f.cells.clear();
  f.cells.reserve(4 * cells.size());
  for (const auto& c : cells)
    for (int dx = 0; dx < 2; ++dx)
      for (int dy = 0; dy < 2; ++dy)
        f.cells.push_back({c.level + 1, 2 * c.ix + dx, 2 * c.iy + dy});
  return f;
}

PatchMesh build_patch_mesh(const CellConfig& cfg, int refinements) {
  if (cfg.full_dirichlet || cfg.neumann_bottom)
    throw config_error("patch mesh serves windowed cells only");
  if (cfg.base_div < 8) throw config_error("patch mesh: base_div >= 8");
  PatchMesh m;
  m.epsilon = cfg.epsilon;
  m.W = cfg.epsilon * kPi / 2.0;
  m.n2 = 2 * cfg.base_div;
  m.n1 = static_cast<int>(std::max(2L, std::lround(cfg.epsilon * m.n2)));
  const double eps_eta = cfg.epsilon * std::exp(cfg.ln_eta);
  if (!(eps_eta > 0.0)) throw config_error("patch mesh: window below double range");
  const double root_w = 2.0 * m.W / m.n1;
  int L = 0;
  while (root_w * std::pow(0.5, L) > eps_eta / 8.0 && L < 52) ++L;
  if (root_w * std::pow(0.5, L) > eps_eta / 8.0)
    throw config_error("patch mesh: window too small for the double lattice");
  m.max_level = L;
  const double w_fin = root_w * std::pow(0.5, L);
  const long snap = std::max(1L, std::lround(eps_eta / w_fin));
  m.eta_snapped = snap * w_fin / cfg.epsilon;
  m.mu_snapped = -1.0 / (cfg.epsilon * std::log(m.eta_snapped));
  const double weta = snap * w_fin;

  // recursive refinement: geometric cascade toward the window segment plus a
  // boundary-layer strip of ~eps/3 cells along the bottom
  std::vector<PatchCell> leaves;
  const double eps = cfg.epsilon;
  std::function<void(PatchCell)> emit = [&](PatchCell c) {
    const double hx = 2.0 * m.W / (static_cast<double>(m.n1) * std::pow(2.0, c.level));
    const double hy = kPi / (static_cast<double>(m.n2) * std::pow(2.0, c.level));
    const double x0 = -m.W + c.ix * hx;
    const double x1v = x0 + hx;
    const double y0 = c.iy * hy;
    const double s = std::max(hx, hy);
    bool split = false;
    if (c.level < L) {
      const double dx = std::max({x0 - weta, -x1v - weta, 0.0});
      const double dist = std::hypot(dx, y0);
      if (s > 0.8 * dist) split = true;
      if (y0 < s && s > eps / 3.0) split = true;
    }
    if (split) {
      for (int dx2 = 0; dx2 < 2; ++dx2)
        for (int dy2 = 0; dy2 < 2; ++dy2)
          emit({c.level + 1, 2 * c.ix + dx2, 2 * c.iy + dy2});
    } else {
      leaves.push_back(c);
    }
  };
  for (long i = 0; i < m.n1; ++i)
    for (long j = 0; j < m.n2; ++j) emit({0, i, j});

  // 2:1 balance (periodic in x1)
  bool changed = true;
  while (changed) {
    changed = false;
    std::unordered_map<CellKey, size_t, CellKeyHash> index;
    index.reserve(leaves.size() * 2);
    for (size_t i = 0; i < leaves.size(); ++i)
      index[{leaves[i].level, leaves[i].ix, leaves[i].iy}] = i;
    std::vector<char> must_split(leaves.size(), 0);
    auto find_cover = [&](int level, long ix, long iy) -> long {
      // index of the leaf at this level or coarser containing the position
      for (int l = level; l >= 0; --l) {
        const auto it = index.find({l, ix >> (level - l), iy >> (level - l)});
        if (it != index.end()) return static_cast<long>(it->second);
      }
      return -1;
    };
    for (const auto& c : leaves) {
      const long ncols = static_cast<long>(m.n1) << c.level;
      const long nrows = static_cast<long>(m.n2) << c.level;
      const long nb[4][2] = {{(c.ix + 1) % ncols, c.iy},
                             {(c.ix - 1 + ncols) % ncols, c.iy},
                             {c.ix, c.iy + 1},
                             {c.ix, c.iy - 1}};
      for (const auto& q : nb) {
        if (q[1] < 0 || q[1] >= nrows) continue;
        const long j = find_cover(c.level, q[0], q[1]);
        if (j >= 0 && leaves[j].level < c.level - 1) must_split[j] = 1;
      }
    }
    std::vector<PatchCell> next;
    next.reserve(leaves.size() + 16);
    for (size_t i = 0; i < leaves.size(); ++i) {
      if (!must_split[i]) {
        next.push_back(leaves[i]);
        continue;
      }
      changed = true;
      const auto& c = leaves[i];
      for (int dx2 = 0; dx2 < 2; ++dx2)
        for (int dy2 = 0; dy2 < 2; ++dy2)
          next.push_back({c.level + 1, 2 * c.ix + dx2, 2 * c.iy + dy2});
    }
    leaves.swap(next);
  }
  m.cells = std::move(leaves);
  for (int r = 0; r < refinements; ++r) m = m.refined();
  return m;
}

bool patch_backend(const CellConfig& cfg) {
  if (cfg.full_dirichlet || cfg.neumann_bottom) return false;
  if (cfg.backend == MeshBackend::Tensor) return false;
  if (cfg.backend == MeshBackend::Patch) return true;
  return cfg.ln_eta < std::log(1e-8);
}

CellSystem assemble(const PatchMesh& mesh, const CellConfig& cfg) {
  CellSystem sys;
  sys.physical = true;
  sys.epsilon = cfg.epsilon;
  sys.tau = cfg.tau;
  sys.kappa = cfg.kappa;
  sys.dense_threshold = cfg.dense_threshold;
  sys.lanczos_max = cfg.lanczos_max;
  sys.eig_tol = cfg.eig_residual_tol;
  sys.eta_effective = mesh.eta_snapped;
  sys.mu_effective = mesh.mu_snapped;
  sys.mesh.level = mesh.refinements;
  if (!(std::abs(cfg.tau) <= 1.0 - cfg.kappa))
    throw config_error("assemble: |tau| <= 1 - kappa required");

  const int L = mesh.max_level;
  const long ncolsL = static_cast<long>(mesh.n1) << L;
  const long nrowsL = static_cast<long>(mesh.n2) << L;
  const double wfx = 2.0 * mesh.W / static_cast<double>(ncolsL);
  const double wfy = kPi / static_cast<double>(nrowsL);
  const long snap = std::lround(mesh.eta_snapped * mesh.epsilon / wfx);
  const long center = ncolsL / 2;

  // node registry on the finest lattice, periodic in a
  std::unordered_map<NodeKey, int, NodeKeyHash> node_id;
  std::vector<NodeKey> node_keys;
  const auto intern = [&](long a, long b) {
    a %= ncolsL;
    if (a < 0) a += ncolsL;
    const auto it = node_id.find({a, b});
    if (it != node_id.end()) return it->second;
    const int id = static_cast<int>(node_keys.size());
    node_id.emplace(NodeKey{a, b}, id);
    node_keys.push_back({a, b});
    return id;
  };

  struct CellNodes {
    int corner[2][2];
    double hx, hy;
  };
  std::vector<CellNodes> cells;
  cells.reserve(mesh.cells.size());
  for (const auto& c : mesh.cells) {
    const long sh = 1L << (L - c.level);
    CellNodes cn;
    cn.hx = wfx * static_cast<double>(sh);
    cn.hy = wfy * static_cast<double>(sh);
    for (int dx = 0; dx < 2; ++dx)
      for (int dy = 0; dy < 2; ++dy)
        cn.corner[dx][dy] = intern((c.ix + dx) * sh, (c.iy + dy) * sh);
    cells.push_back(cn);
  }

  // hanging nodes: midpoints of coarse edges that exist in the registry
  std::unordered_map<int, std::pair<int, int>> hanging;
  for (size_t ci = 0; ci < mesh.cells.size(); ++ci) {
    const auto& c = mesh.cells[ci];
    if (c.level == L) continue;
    const long sh = 1L << (L - c.level);
    const long half = sh / 2;
    const long a0 = c.ix * sh, b0 = c.iy * sh;
    const auto check = [&](long am, long bm, int n0, int n1c) {
      long aw = am % ncolsL;
      if (aw < 0) aw += ncolsL;
      const auto it = node_id.find({aw, bm});
      if (it == node_id.end()) return;
      hanging.emplace(it->second, std::make_pair(n0, n1c));
    };
    const auto& cn = cells[ci];
    check(a0 + half, b0, cn.corner[0][0], cn.corner[1][0]);        // bottom
    check(a0 + half, b0 + sh, cn.corner[0][1], cn.corner[1][1]);   // top
    check(a0, b0 + half, cn.corner[0][0], cn.corner[0][1]);        // left
    check(a0 + sh, b0 + half, cn.corner[1][0], cn.corner[1][1]);   // right
  }

  // classify nodes: Dirichlet on the top line and on the bottom window
  const int n_nodes = static_cast<int>(node_keys.size());
  std::vector<int> dof_of(n_nodes, -1);
  std::vector<char> is_dirichlet(n_nodes, 0);
  for (int i = 0; i < n_nodes; ++i) {
    const auto& k = node_keys[i];
    if (k.b == nrowsL) is_dirichlet[i] = 1;
    if (k.b == 0 && std::labs(k.a - center) <= snap) is_dirichlet[i] = 1;
  }
  int next = 0;
  for (int i = 0; i < n_nodes; ++i)
    if (!is_dirichlet[i] && !hanging.count(i)) dof_of[i] = next++;
  sys.n_dof = next;
  if (sys.n_dof == 0) throw config_error("patch assemble: no free dofs");

  // recursive expansion of a node into dof weights
  std::vector<std::vector<std::pair<int, double>>> expansion(n_nodes);
  std::vector<char> expanded(n_nodes, 0);
  std::function<const std::vector<std::pair<int, double>>&(int)> expand =
      [&](int i) -> const std::vector<std::pair<int, double>>& {
    if (expanded[i]) return expansion[i];
    expanded[i] = 1;
    if (is_dirichlet[i]) return expansion[i];
    if (dof_of[i] >= 0) {
      expansion[i] = {{dof_of[i], 1.0}};
      return expansion[i];
    }
    const auto& h = hanging.at(i);
    for (const auto& [d, w] : expand(h.first)) expansion[i].emplace_back(d, 0.5 * w);
    for (const auto& [d, w] : expand(h.second)) expansion[i].emplace_back(d, 0.5 * w);
    return expansion[i];
  };

  sys.node_y1.resize(sys.n_dof);
  sys.node_x2.resize(sys.n_dof);
  for (int i = 0; i < n_nodes; ++i) {
    const int d = dof_of[i];
    if (d < 0) continue;
    sys.node_y1[d] = (-mesh.W + node_keys[i].a * wfx) / mesh.epsilon;
    sys.node_x2[d] = node_keys[i].b * wfy;
  }

  // local bilinear blocks per cell, expanded through the constraints
  std::vector<Eigen::Triplet<double>> t1, t2, tm, ts;
  const double m1[2][2] = {{2.0 / 6.0, 1.0 / 6.0}, {1.0 / 6.0, 2.0 / 6.0}};
  const double k1[2][2] = {{1.0, -1.0}, {-1.0, 1.0}};
  const double s1[2][2] = {{0.0, -1.0}, {1.0, 0.0}};
  for (const auto& cn : cells) {
    for (int ia = 0; ia < 2; ++ia)
      for (int ib = 0; ib < 2; ++ib)
        for (int ja = 0; ja < 2; ++ja)
          for (int jb = 0; jb < 2; ++jb) {
            const double vK1 = k1[ia][ja] / cn.hx * m1[ib][jb] * cn.hy;
            const double vK2 = m1[ia][ja] * cn.hx * k1[ib][jb] / cn.hy;
            const double vM = m1[ia][ja] * cn.hx * m1[ib][jb] * cn.hy;
            const double vS = s1[ia][ja] * m1[ib][jb] * cn.hy;
            const auto& rows = expand(cn.corner[ia][ib]);
            const auto& colsx = expand(cn.corner[ja][jb]);
            for (const auto& [r, wr] : rows)
              for (const auto& [cc, wc] : colsx) {
                const double w = wr * wc;
                t1.emplace_back(r, cc, w * vK1);
                t2.emplace_back(r, cc, w * vK2);
                tm.emplace_back(r, cc, w * vM);
                ts.emplace_back(r, cc, w * vS);
              }
          }
  }
  sys.K1.resize(sys.n_dof, sys.n_dof);
  sys.K2.resize(sys.n_dof, sys.n_dof);
  sys.M.resize(sys.n_dof, sys.n_dof);
  sys.S.resize(sys.n_dof, sys.n_dof);
  sys.K1.setFromTriplets(t1.begin(), t1.end());
  sys.K2.setFromTriplets(t2.begin(), t2.end());
  sys.M.setFromTriplets(tm.begin(), tm.end());
  sys.S.setFromTriplets(ts.begin(), ts.end());
  return sys;
}

std::vector<BandPoint> band_function(const CellConfig& cfg,
                                     const std::vector<double>& tau_grid, int k,
                                     int levels) {
  if (levels < 1) throw config_error("band_function: levels >= 1");
  std::vector<BandPoint> out;
  for (double tau : tau_grid) {
    BandPoint pt;
    pt.tau = tau;
    try {
      CellConfig c = cfg;
      c.tau = tau;
      if (std::abs(tau) > 1.0 - cfg.kappa)
        throw config_error("band_function: tau outside |tau| <= 1 - kappa");
      const bool patch = patch_backend(c);
      CellMesh mesh;
      PatchMesh pmesh;
      if (patch)
        pmesh = build_patch_mesh(c);
      else
        mesh = build_mesh(c);
      std::vector<std::vector<double>> lam(k);
      double shift = -1.0;
      for (int l = 0; l < levels; ++l) {
        if (l > 0) {
          if (patch)
            pmesh = pmesh.refined();
          else
            mesh = mesh.refined();
        }
        const CellSystem sys = patch ? assemble(pmesh, c) : assemble(mesh, c);
        const SpectralResult res = solve_eigs(sys, k, shift);
        for (int i = 0; i < k; ++i) lam[i].push_back(res.eigenvalues[i]);
        shift = 0.9 * res.eigenvalues[0] +
                0.1 * (tau * tau / (cfg.epsilon * cfg.epsilon));
      }
      const double shift0 = tau * tau / (cfg.epsilon * cfg.epsilon);
      for (double v : lam[0]) pt.per_level.push_back(v - shift0);
      pt.bracket_ok = true;
      const double n_limit = 2.0 * std::sqrt(cfg.kappa) / cfg.epsilon;
      for (int i = 0; i < k; ++i) {
        const auto ext = fitting::richardson(lam[i]);
        pt.shifted.push_back(ext.value - shift0);
        pt.shifted_finest.push_back(lam[i].back() - shift0);
        pt.rates.push_back(ext.rate);
        if (i + 1 < n_limit) {
          const double n2 = static_cast<double>(i + 1) * (i + 1);
          const double slack =
              std::max(1e-3 * n2, 5.0 * std::abs(lam[i].back() - ext.value));
          if (pt.shifted_finest.back() < 0.25 - 1e-9 ||
              pt.shifted.back() > n2 + slack)
            pt.bracket_ok = false;
        }
      }
    } catch (const std::exception& e) {
      pt.error = e.what();
    }
    out.push_back(pt);
  }
  return out;
}

Eigen::VectorXcd shifted_solve(const CellSystem& sys, const Eigen::VectorXcd& f) {
  const double ie2 = 1.0 / (sys.epsilon * sys.epsilon);
  const double shift = sys.tau * sys.tau * ie2;
  if (sys.tau == 0.0) {
    const SpMatD C = sys.stiffness_real();
    ShiftedSolver<double> solver(C);
    const Eigen::VectorXd br = sys.M * Eigen::VectorXd(f.real());
    const Eigen::VectorXd bi = sys.M * Eigen::VectorXd(f.imag());
    Eigen::VectorXcd u(sys.n_dof);
    u.real() = solver.solve(br);
    u.imag() = solver.solve(bi);
    return u;
  }
  SpMatC C = sys.stiffness();
  C -= (cplx(shift, 0.0) * sys.M.cast<cplx>()).eval();
  ShiftedSolver<cplx> solver(C);
  const Eigen::VectorXcd b = sys.M.cast<cplx>() * f;
  return solver.solve(b);
}

ResolventComparison resolvent_compare(const CellSystem& sys,
                                      const std::function<double(double)>& F,
                                      double mu) {
  // reference on its own fine uniform grid, interpolated to the mesh nodes
  constexpr int kRef = 2001;
  homogenized::SampledFunction1D f1d;
  f1d.grid.resize(kRef);
  f1d.values.resize(kRef);
  for (int i = 0; i < kRef; ++i) {
    f1d.grid[i] = kPi * i / (kRef - 1);
    f1d.values[i] = F(f1d.grid[i]);
  }
  const homogenized::SampledFunction1D u1d = homogenized::apply_inverse(f1d, mu);
  const auto interp = [&](double x2) {
    const double t = x2 / kPi * (kRef - 1);
    const int i = std::min(kRef - 2, std::max(0, static_cast<int>(t)));
    const double w = t - i;
    return (1.0 - w) * u1d.values[i] + w * u1d.values[i + 1];
  };

  const Eigen::VectorXd fvec = sys.profile(F);
  const Eigen::VectorXcd U = shifted_solve(sys, fvec.cast<cplx>());
  Eigen::VectorXd ref(sys.n_dof);
  for (int d = 0; d < sys.n_dof; ++d) ref[d] = interp(sys.node_x2[d]);
  ResolventComparison out;
  out.norm_F = sys.norm_M(fvec.cast<cplx>());
  out.norm_U = sys.norm_M(U);
  out.discrepancy = sys.norm_M(U - ref.cast<cplx>()) / out.norm_F;
  return out;
}

SanityReport sanity_bounds(const CellSystem& sys, const Eigen::VectorXcd& U,
                           const Eigen::VectorXcd& f) {
  SanityReport rep;
  const double nf = sys.norm_M(f);
  if (nf == 0.0) {
    rep.ok = sys.norm_M(U) <= 1e-12;
    return rep;
  }
  rep.ratio_l2 = sys.norm_M(U) / nf;
  rep.ratio_dx2 = sys.norm_dx2(U) / nf;
  rep.ratio_dx1 = sys.norm_dx1(U) / nf;
  const double tol = 1e-9;
  rep.ok = rep.ratio_l2 <= 4.0 + tol && rep.ratio_dx2 <= 2.0 + tol &&
           rep.ratio_dx1 <= 2.0 / std::sqrt(sys.kappa) + tol;
  return rep;
}

ModeDistance compare_ground_mode(const CellSystem& sys, const SpectralResult& res,
                                 const std::function<double(double, double)>& mode) {
  if (res.vectors.cols() < 1)
    throw std::domain_error("compare_ground_mode: no eigenvector available");
  const Eigen::VectorXcd ref = sys.nodal(mode).cast<cplx>();
  Eigen::VectorXcd v = res.vectors.col(0);
  const double ref_norm = sys.norm_M(ref);
  const double v_norm = sys.norm_M(v);
  const cplx ip = dot_form(sys.M, v, ref);
  const cplx phase = (std::abs(ip) > 0.0) ? ip / std::abs(ip) : cplx(1.0, 0.0);
  v *= phase * (ref_norm / v_norm);
  const Eigen::VectorXcd d = v - ref;
  ModeDistance out;
  out.ref_norm = ref_norm;
  out.l2 = sys.norm_M(d);
  const double g2 = sys.norm_dx1(d) * sys.norm_dx1(d) + sys.norm_dx2(d) * sys.norm_dx2(d);
  out.h1 = std::sqrt(out.l2 * out.l2 + g2);
  return out;
}

}  // namespace stripwave::cell
