#include "cofrk/stacked_model.hpp"

namespace cofrk {

Vector StackedModel::residual(const Matrix& beta) const {
  if (q == 0) return z;
  Vector beta_vec(p * q);
  for (int j = 0; j < p; ++j)
    for (int k = 0; k < q; ++k) beta_vec[j * q + k] = beta(j, k);
  return z - f_design * beta_vec;
}

StackedModel build_stacked_model(const BauGrid& grid, const SpMat& phi,
                                 const Matrix& f_bau,
                                 const std::vector<std::vector<Footprint>>& footprints,
                                 const std::vector<Vector>& values,
                                 const ModelParams& params) {
  params.validate();
  const int p = params.p;
  const int q = params.q;
  if (static_cast<int>(footprints.size()) != p || static_cast<int>(values.size()) != p)
    throw std::invalid_argument("build_stacked_model: need footprints and values for each process");
  if (phi.rows() != grid.size())
    throw std::invalid_argument("build_stacked_model: phi rows must match the BAU count");
  if (f_bau.cols() != q || (q > 0 && f_bau.rows() != grid.size()))
    throw std::invalid_argument("build_stacked_model: covariate matrix must be B x q");

  StackedModel model;
  model.p = p;
  model.q = q;
  model.n_bau = grid.size();
  model.n_basis = static_cast<int>(phi.cols());
  model.offset.assign(1, 0);

  for (int j = 0; j < p; ++j) {
    if (values[j].size() != static_cast<Eigen::Index>(footprints[j].size()))
      throw std::invalid_argument("build_stacked_model: footprint/value mismatch for process " +
                                  std::to_string(j));
    model.offset.push_back(model.offset.back() + static_cast<int>(footprints[j].size()));
  }

  const int n_total = model.offset.back();
  model.z = Vector(n_total);
  std::vector<Triplet> f_trips, phi_trips;

  for (int j = 0; j < p; ++j) {
    const int nj = model.n_obs(j);
    SpMat c_j(0, grid.size());
    if (nj > 0) {
      c_j = build_obs_aggregation(grid, footprints[j]).weights;
      model.z.segment(model.offset[j], nj) = values[j];
    }
    model.c_obs.push_back(c_j);

    SpMat x_j = (c_j * phi).pruned();
    x_j.makeCompressed();
    model.x_block.push_back(x_j);
    for (int k = 0; k < x_j.outerSize(); ++k)
      for (SpMat::InnerIterator it(x_j, k); it; ++it)
        phi_trips.emplace_back(model.offset[j] + static_cast<int>(it.row()),
                               j * model.n_basis + static_cast<int>(it.col()),
                               it.value());

    if (q > 0 && nj > 0) {
      const Matrix f_j = c_j * f_bau;
      for (int r = 0; r < f_j.rows(); ++r)
        for (int k = 0; k < q; ++k)
          if (f_j(r, k) != 0.0)
            f_trips.emplace_back(model.offset[j] + r, j * q + k, f_j(r, k));
    }

    Vector vx = (j < static_cast<int>(params.v_xi.size()) && params.v_xi[j].size() > 0)
                    ? params.v_xi[j]
                    : Vector::Ones(grid.size());
    if (vx.size() != grid.size())
      throw std::invalid_argument("build_stacked_model: v_xi length mismatch for process " +
                                  std::to_string(j));
    Vector ve = (j < static_cast<int>(params.v_eps.size()) && params.v_eps[j].size() > 0)
                    ? params.v_eps[j]
                    : Vector::Ones(nj);
    if (ve.size() != nj)
      throw std::invalid_argument("build_stacked_model: v_eps length mismatch for process " +
                                  std::to_string(j));
    model.v_xi.push_back(vx);
    model.v_eps.push_back(ve);
    model.noise.emplace_back(c_j, vx, ve);
  }

  model.f_design = SpMat(n_total, p * q);
  model.f_design.setFromTriplets(f_trips.begin(), f_trips.end());
  model.f_design.makeCompressed();
  model.phi_design = SpMat(n_total, static_cast<Eigen::Index>(p) * model.n_basis);
  model.phi_design.setFromTriplets(phi_trips.begin(), phi_trips.end());
  model.phi_design.makeCompressed();
  return model;
}

Vector StackedNoiseFactor::solve(const Vector& rhs) const {
  Vector out(rhs.size());
  for (int j = 0; j < model->p; ++j) {
    const int nj = model->n_obs(j);
    if (nj == 0) continue;
    out.segment(model->offset[j], nj) = blocks[j].solve(Vector(rhs.segment(model->offset[j], nj)));
  }
  return out;
}

Matrix StackedNoiseFactor::solve_dense(const Matrix& rhs) const {
  Matrix out(rhs.rows(), rhs.cols());
  for (int j = 0; j < model->p; ++j) {
    const int nj = model->n_obs(j);
    if (nj == 0) continue;
    out.middleRows(model->offset[j], nj) =
        blocks[j].solve(Matrix(rhs.middleRows(model->offset[j], nj)));
  }
  return out;
}

double StackedNoiseFactor::log_det() const {
  double ld = 0.0;
  for (const NoiseFactor& b : blocks) ld += b.log_det();
  return ld;
}

StackedNoiseFactor factor_noise(const StackedModel& model, const ModelParams& params) {
  StackedNoiseFactor f;
  f.model = &model;
  for (int j = 0; j < model.p; ++j)
    f.blocks.push_back(model.noise[j].factor(params.sigma2_xi[j], params.sigma2_eps[j]));
  return f;
}

Matrix dense_noise(const StackedModel& model, const ModelParams& params) {
  const int n = model.n_total();
  Matrix d = Matrix::Zero(n, n);
  for (int j = 0; j < model.p; ++j) {
    const int nj = model.n_obs(j);
    if (nj == 0) continue;
    d.block(model.offset[j], model.offset[j], nj, nj) =
        model.noise[j].dense(params.sigma2_xi[j], params.sigma2_eps[j]);
  }
  return d;
}

}  // namespace cofrk
