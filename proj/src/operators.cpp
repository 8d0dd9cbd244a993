#include "hvp/operators.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>

#include "hvp/errors.hpp"
#include "hvp/lagrangian.hpp"

namespace hvp {
namespace {

using Triplet = Eigen::Triplet<double>;

/// Accumulates one matrix row: column -> value.
using Row = std::map<int, double>;

/// Adds scale * stencil row `node` of m into `row`, mapping node columns to
/// interior unknowns (boundary columns dropped: the velocity vanishes there).
void add_interior(Row& row, const SpMat& m, int node, double scale, const StackLayout& layout,
                  int col_offset) {
  for (SpMat::InnerIterator it(m, node); it; ++it) {
    const int r = layout.interior_index(static_cast<int>(it.col()));
    if (r >= 0) row[col_offset + r] += scale * it.value();
  }
}

void add_all(Row& row, const SpMat& m, int node, double scale, int col_offset) {
  for (SpMat::InnerIterator it(m, node); it; ++it) {
    row[col_offset + static_cast<int>(it.col())] += scale * it.value();
  }
}

void flush(std::vector<Triplet>& t, int r, const Row& row) {
  for (const auto& [c, v] : row) t.emplace_back(r, c, v);
}

}  // namespace

StackLayout::StackLayout(const Grid& grid)
    : grid_(grid), m_(grid.interior_size()), n_(grid.size()), interior_of_node_(grid.size(), -1) {
  node_of_interior_.reserve(m_);
  for (int j = 1; j < grid.ny - 1; ++j)
    for (int i = 1; i < grid.nx - 1; ++i) {
      interior_of_node_[grid.index(i, j)] = static_cast<int>(node_of_interior_.size());
      node_of_interior_.push_back(grid.index(i, j));
    }
}

Eigen::VectorXd StackLayout::pack(const StateField& u) const {
  Eigen::VectorXd x(size());
  for (int r = 0; r < m_; ++r) {
    x(v_offset(0) + r) = u.v.x(node_of_interior_[r]);
    x(v_offset(1) + r) = u.v.y(node_of_interior_[r]);
  }
  x.segment(h_offset(), n_) = flat(u.h);
  x.segment(a_offset(), n_) = flat(u.a);
  return x;
}

StateField StackLayout::unpack(const Eigen::VectorXd& x) const {
  StateField u = StateField::zero(grid_);
  for (int r = 0; r < m_; ++r) {
    u.v.x(node_of_interior_[r]) = x(v_offset(0) + r);
    u.v.y(node_of_interior_[r]) = x(v_offset(1) + r);
  }
  Eigen::Map<Eigen::VectorXd>(u.h.data(), n_) = x.segment(h_offset(), n_);
  Eigen::Map<Eigen::VectorXd>(u.a.data(), n_) = x.segment(a_offset(), n_);
  return u;
}

FrozenCoefficients frozen_coefficients(const StateField& u1, const DiffOps& ops,
                                       const RheologyParams& params) {
  try {
    u1.check();
  } catch (const CorruptState& e) {
    throw AssemblyError(std::string("frozen state unusable: ") + e.what());
  }
  if (u1.h.minCoeff() < params.kappa) throw AssemblyError("frozen state has h < kappa");
  const Grid& g = u1.grid;
  const TensorField gv = gradient(ops, u1.v);
  const VectorField gh = grad_h(ops, u1.h), ga = grad_h(ops, u1.a);
  FrozenCoefficients c;
  c.a.resize(g.size());
  c.P.resize(g.nx, g.ny);
  c.delta_reg.resize(g.nx, g.ny);
  c.dP_dh.resize(g.nx, g.ny);
  c.dP_da.resize(g.nx, g.ny);
  c.grad_P = VectorField::zero(g);
  c.h1 = u1.h;
  c.a1 = u1.a;
  for (int p = 0; p < g.size(); ++p) {
    const Eigen::Matrix2d eps = 0.5 * (gv[p] + gv[p].transpose());
    const double h = u1.h(p), a = u1.a(p);
    const auto ct = coeff_tensor(eps, h, a, params);
    c.a[p] = ct.a;
    c.P(p) = ct.P;
    c.delta_reg(p) = ct.delta_reg;
    c.dP_dh(p) = ice_strength_dh(a, params);
    c.dP_da(p) = ice_strength_da(h, a, params);
    c.grad_P.x(p) = c.dP_dh(p) * gh.x(p) + c.dP_da(p) * ga.x(p);
    c.grad_P.y(p) = c.dP_dh(p) * gh.y(p) + c.dP_da(p) * ga.y(p);
  }
  return c;
}

SpMat assemble_linearized_hibler(const FrozenCoefficients& c, const StackLayout& layout,
                                 const DiffOps& ops, const RheologyParams& params) {
  const int m = layout.interior();
  const Eigen::Matrix4d s = s_matrix(params.e);
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(2 * m) * 20);
  for (int r = 0; r < m; ++r) {
    const int p = layout.node_of_interior(r);
    const double low = 1.0 / (2.0 * params.rho_ice * c.h1(p) * c.delta_reg(p));
    const Eigen::Vector2d gp(c.grad_P.x(p), c.grad_P.y(p));
    for (int i = 0; i < 2; ++i) {
      Row row;
      for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) {
            const double a = c.a[p](2 * i + j, 2 * k + l);
            if (a != 0.0) add_interior(row, ops.dd(k, l), p, -a, layout, layout.v_offset(j));
            // (S eps(v))_ij = sum_kl S[(ij),(kl)] d_k v_l
            const double w = low * gp(j) * s(2 * i + j, 2 * k + l);
            if (w != 0.0) add_interior(row, ops.d(k), p, w, layout, layout.v_offset(l));
          }
      }
      flush(t, layout.v_offset(i) + r, row);
    }
  }
  SpMat out(2 * m, 2 * m);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

SpMat assemble_linearized_hibler(const StateField& u1, const DiffOps& ops,
                                 const RheologyParams& params) {
  return assemble_linearized_hibler(frozen_coefficients(u1, ops, params), StackLayout(u1.grid), ops,
                                    params);
}

SpMat assemble_B1(const FrozenCoefficients& c, const StackLayout& layout, const DiffOps& ops,
                  const RheologyParams& params) {
  const int m = layout.interior(), n = layout.nodes();
  std::vector<Triplet> t;
  for (int r = 0; r < m; ++r) {
    const int p = layout.node_of_interior(r);
    const double ch = c.dP_dh(p) / (2.0 * params.rho_ice * c.h1(p));
    const double ca = c.dP_da(p) / (2.0 * params.rho_ice * c.h1(p));
    for (int i = 0; i < 2; ++i) {
      Row row;
      add_all(row, ops.d(i), p, ch, 0);
      add_all(row, ops.d(i), p, ca, n);
      flush(t, layout.v_offset(i) + r, row);
    }
  }
  SpMat out(2 * m, 2 * n);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

SpMat assemble_B1(const StateField& u1, const DiffOps& ops, const RheologyParams& params) {
  return assemble_B1(frozen_coefficients(u1, ops, params), StackLayout(u1.grid), ops, params);
}

SpMat assemble_scaled_div(const ScalarField& factor, const StackLayout& layout, const DiffOps& ops) {
  const int m = layout.interior(), n = layout.nodes();
  std::vector<Triplet> t;
  for (int p = 0; p < n; ++p) {
    Row row;
    add_interior(row, ops.d(0), p, factor(p), layout, 0);
    add_interior(row, ops.d(1), p, factor(p), layout, m);
    flush(t, p, row);
  }
  SpMat out(n, 2 * m);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

SpMat block(const SpMat& m, int r0, int nr, int c0, int nc) {
  std::vector<Triplet> t;
  for (int r = r0; r < r0 + nr; ++r)
    for (SpMat::InnerIterator it(m, r); it; ++it) {
      const int c = static_cast<int>(it.col());
      if (c >= c0 && c < c0 + nc) t.emplace_back(r - r0, c - c0, it.value());
    }
  SpMat out(nr, nc);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

DiscreteOperator assemble_operator_matrix(const StateField& u1, const DiffOps& ops,
                                          const RheologyParams& params, double omega) {
  const StackLayout layout(u1.grid);
  const FrozenCoefficients c = frozen_coefficients(u1, ops, params);
  const SpMat ah = assemble_linearized_hibler(c, layout, ops, params);
  const SpMat b1 = assemble_B1(c, layout, ops, params);
  const SpMat hdiv = assemble_scaled_div(c.h1, layout, ops);
  const SpMat adiv = assemble_scaled_div(c.a1, layout, ops);
  const int m2 = 2 * layout.interior(), n = layout.nodes();

  std::vector<Triplet> t;
  auto put = [&t](const SpMat& b, int r0, int c0, double scale) {
    for (int r = 0; r < b.outerSize(); ++r)
      for (SpMat::InnerIterator it(b, r); it; ++it)
        t.emplace_back(r0 + r, c0 + static_cast<int>(it.col()), scale * it.value());
  };
  put(ah, 0, 0, -1.0);
  put(b1, 0, m2, 1.0);
  put(hdiv, m2, 0, 1.0);
  put(adiv, m2 + n, 0, 1.0);
  if (omega != 0.0) {
    for (int r = 0; r < layout.size(); ++r) t.emplace_back(r, r, omega);
  }
  DiscreteOperator op;
  op.layout = layout;
  op.omega = omega;
  op.matrix.resize(layout.size(), layout.size());
  op.matrix.setFromTriplets(t.begin(), t.end());
  op.matrix.makeCompressed();
  return op;
}

SpMat assemble_dirichlet_laplacian(const Grid& grid) {
  const StackLayout layout(grid);
  const DiffOps ops(grid);
  std::vector<Triplet> t;
  for (int r = 0; r < layout.interior(); ++r) {
    const int p = layout.node_of_interior(r);
    Row row;
    add_interior(row, ops.dd(0, 0), p, -1.0, layout, 0);
    add_interior(row, ops.dd(1, 1), p, -1.0, layout, 0);
    flush(t, r, row);
  }
  SpMat out(layout.interior(), layout.interior());
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

void dump_coo(const std::string& path, const SpMat& m) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open operator dump: " + path);
  os << "% rows " << m.rows() << " cols " << m.cols() << " nnz " << m.nonZeros() << "\n";
  os << std::setprecision(17);
  for (int r = 0; r < m.outerSize(); ++r)
    for (SpMat::InnerIterator it(m, r); it; ++it) os << r << ' ' << it.col() << ' ' << it.value() << '\n';
}

}  // namespace hvp
