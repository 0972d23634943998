#include "ddnn/orchestrator.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "ddnn/checkpoint.hpp"
#include "ddnn/error.hpp"
#include "ddnn/kernels.hpp"
#include "ddnn/rng.hpp"

namespace ddnn {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<int> net_widths(int input_dim, int hidden_width, int hidden_depth,
                            int out_dim) {
  std::vector<int> w;
  w.push_back(input_dim);
  for (int i = 0; i < hidden_depth; ++i) w.push_back(hidden_width);
  w.push_back(out_dim);
  return w;
}

/// Frozen constraint data for one subdomain given current predictions.
ConstraintContext build_context(const DdmModel& model,
                                const InterfacePredictions& preds,
                                int subdomain) {
  ConstraintContext ctx;
  for (int iface_id : model.partition.interfaces_of(subdomain)) {
    const InterfaceSegment& iface = model.partition.interfaces[iface_id];
    ConstraintContext::Segment seg;
    seg.interface_id = iface_id;
    seg.points = model.interface_eval_points(iface_id);
    seg.eta = pad_normal(iface.normal, seg.points.cols);
    seg.ref_values = preds.values[iface_id];
    seg.ref_derivs = preds.derivs[iface_id];
    ctx.segments.push_back(std::move(seg));
  }
  return ctx;
}

/// One subdomain's dual-ascent solve against frozen interface predictions.
void solve_subdomain(DdmModel& model, const RunConfig& cfg,
                     const InterfacePredictions& preds, const LocalDataset& data,
                     int i, int outer_k, std::vector<SubdomainTraceRow>& trace) {
  const ConstraintContext ctx = build_context(model, preds, i);
  const MlpNetwork& arch = model.local_nets[i];
  const Mat& X = data.X;
  const Mat& U = data.U;

  PrimalUpdateConfig pcfg;
  pcfg.max_outer = cfg.primal_iters;
  pcfg.eps_primal = cfg.eps_pr;
  pcfg.eps_lin = cfg.eps_lin;
  pcfg.lbfgs.memory = cfg.lbfgs_memory;
  pcfg.lbfgs.max_iters = cfg.primal_lbfgs_iters;

  LbfgsConfig fit_cfg;
  fit_cfg.memory = cfg.lbfgs_memory;
  fit_cfg.max_iters = cfg.mse_fit_iters;
  fit_cfg.grad_tol = cfg.eps_pr;

  struct CallRecord {
    double wall_ms = 0.0;
    int primal_updates = 0;
    double loss = 0.0;
  };
  std::vector<CallRecord> calls;

  const auto record_call = [&](Clock::time_point t0, int updates, const VecD& theta) {
    MlpNetwork net = arch;
    net.params = theta;
    VecD g;
    CallRecord rec;
    rec.wall_ms = ms_since(t0);
    rec.primal_updates = updates;
    rec.loss = mse_loss(net, X, U, g);
    calls.push_back(rec);
  };

  DualProblem prob;
  prob.fit_unconstrained = [&](const VecD& theta) {
    const auto t0 = Clock::now();
    const LossFn loss_fn = [&](const VecD& th, VecD& grad) {
      MlpNetwork net = arch;
      net.params = th;
      return mse_loss(net, X, U, grad);
    };
    VecD out = lbfgs_minimize(loss_fn, theta, fit_cfg).theta;
    record_call(t0, 1, out);
    return out;
  };
  prob.primal_update = [&](const VecD& theta, const VecD& lambda) {
    const auto t0 = Clock::now();
    std::vector<PrimalTraceRow> rows;
    VecD out = (model.method == Method::kLma)
                   ? primal_update_lma(arch, theta, lambda, X, U, ctx, pcfg, &rows)
                   : primal_update_alma(arch, theta, lambda, model.rho, X, U, ctx,
                                        pcfg, &rows);
    record_call(t0, static_cast<int>(rows.size()), out);
    return out;
  };
  prob.residual = [&](const VecD& theta) {
    MlpNetwork net = arch;
    net.params = theta;
    return constraint_residual(net, ctx);
  };
  prob.stationarity = [&](const VecD& theta, const VecD& lambda) {
    MlpNetwork net = arch;
    net.params = theta;
    VecD grad;
    if (model.method == Method::kLma)
      lagrangian(net, lambda, X, U, ctx, grad);
    else
      augmented_lagrangian(net, lambda, model.rho, X, U, ctx, grad);
    return mean_abs(grad);
  };

  DualAscentConfig dcfg;
  dcfg.alpha = cfg.alpha;
  dcfg.rho = cfg.rho;
  dcfg.max_dual_iters = cfg.dual_iters;
  dcfg.eps_lambda = cfg.eps_lambda;
  dcfg.eps_primal = cfg.eps_pr;
  dcfg.update = (model.method == Method::kLma) ? DualUpdateRule::kNadam
                                               : DualUpdateRule::kPenalty;

  DualAscentResult res =
      dual_ascent(model.local_nets[i].params, model.lambdas[i], prob, dcfg,
                  &model.dual_states[i]);
  model.local_nets[i].params = std::move(res.theta);
  model.lambdas[i] = std::move(res.lambda);

  for (std::size_t d = 0; d < res.trace.size(); ++d) {
    const DualTraceRow& row = res.trace[d];
    SubdomainTraceRow out;
    out.outer_iter = outer_k;
    out.dual_iter = row.dual_iter;
    out.primal_updates = d < calls.size() ? calls[d].primal_updates : 0;
    out.loss = d < calls.size() ? calls[d].loss : 0.0;
    out.mean_abs_grad = row.stationarity;
    out.mean_abs_q = row.mean_abs_q;
    out.delta_q = row.delta_q;
    out.wall_ms = d < calls.size() ? calls[d].wall_ms : 0.0;
    trace.push_back(out);
  }
}

void run_indexed(int count, int workers,
                 const std::function<void(int)>& work) {
  if (count == 0) return;
  if (workers <= 1 || count == 1) {
    for (int i = 0; i < count; ++i) work(i);
    return;
  }
  std::vector<std::string> errors(count);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::min(workers, count))
#endif
  for (int i = 0; i < count; ++i) {
    try {
      work(i);
    } catch (const std::exception& e) {
      errors[i] = e.what();
      if (errors[i].empty()) errors[i] = "unknown failure";
    }
  }
  for (int i = 0; i < count; ++i)
    if (!errors[i].empty())
      fail(ErrorCode::kNumericalFailure,
           "task " + std::to_string(i) + " failed: " + errors[i]);
}

}  // namespace

std::uint64_t local_net_seed(std::uint64_t run_seed, int subdomain) {
  return Rng::mix(run_seed, 0x10c41, static_cast<std::uint64_t>(subdomain));
}

std::uint64_t interface_net_seed(std::uint64_t run_seed, int interface) {
  return Rng::mix(run_seed, 0x1f4ce, static_cast<std::uint64_t>(interface));
}

Mat DdmModel::interface_eval_points(int interface_id) const {
  const Mat& colloc = partition.interfaces[interface_id].collocation;
  const int sd = partition.spatial_dim();
  const int n_samples = std::max<std::size_t>(1, param_samples.size());
  const int param_dim =
      param_samples.empty() ? 0 : static_cast<int>(param_samples.front().size());
  Mat pts(colloc.rows * n_samples, sd + param_dim);
  int r = 0;
  for (int s = 0; s < n_samples; ++s)
    for (int p = 0; p < colloc.rows; ++p) {
      for (int a = 0; a < sd; ++a) pts(r, a) = colloc(p, a);
      for (int c = 0; c < param_dim; ++c) pts(r, sd + c) = param_samples[s][c];
      ++r;
    }
  return pts;
}

InterfacePredictions predict_interfaces(const DdmModel& model) {
  InterfacePredictions preds;
  const int n = static_cast<int>(model.partition.interfaces.size());
  preds.values.resize(n);
  preds.derivs.resize(n);
  for (int e = 0; e < n; ++e) {
    const Mat pts = model.interface_eval_points(e);
    const VecD eta = pad_normal(model.partition.interfaces[e].normal, pts.cols);
    kernels::values_and_normal_ders(model.interface_nets[e], pts, eta,
                                    preds.values[e], preds.derivs[e]);
  }
  return preds;
}

MlpNetwork fit_interface(const MlpNetwork& iface_net, const MlpNetwork& left,
                         const MlpNetwork& right, const Mat& eval_points,
                         const VecD& eta_padded, const LbfgsConfig& cfg) {
  Mat lv, ld, rv, rd;
  kernels::values_and_normal_ders(left, eval_points, eta_padded, lv, ld);
  kernels::values_and_normal_ders(right, eval_points, eta_padded, rv, rd);

  const LossFn loss_fn = [&](const VecD& th, VecD& grad) {
    MlpNetwork net = iface_net;
    net.params = th;
    return interface_loss(net, eval_points, eta_padded, lv, ld, rv, rd, grad);
  };
  MlpNetwork out = iface_net;
  out.params = lbfgs_minimize(loss_fn, iface_net.params, cfg).theta;
  return out;
}

ConvergenceStatus check_convergence(const DdmModel& model,
                                    const std::vector<LocalDataset>& locals,
                                    const std::vector<VecD>& prev_params,
                                    const InterfacePredictions& preds,
                                    const RunConfig& cfg, bool dual_evaluable) {
  const int n_sub = static_cast<int>(model.local_nets.size());
  const int n_iface = static_cast<int>(model.partition.interfaces.size());
  ConvergenceStatus st;
  st.dual_evaluable = dual_evaluable || n_iface == 0;
  st.primal_stationarity.assign(n_sub, 0.0);
  st.dual_stationarity.assign(n_sub, std::numeric_limits<double>::quiet_NaN());
  st.interface_mean_abs_q.assign(n_iface, 0.0);

  std::vector<double> iface_abs_sum(n_iface, 0.0);
  std::vector<long> iface_count(n_iface, 0);

  for (int i = 0; i < n_sub; ++i) {
    const ConstraintContext ctx = build_context(model, preds, i);

    VecD grad;
    if (model.method == Method::kLma)
      lagrangian(model.local_nets[i], model.lambdas[i], locals[i].X, locals[i].U,
                 ctx, grad);
    else
      augmented_lagrangian(model.local_nets[i], model.lambdas[i], model.rho,
                           locals[i].X, locals[i].U, ctx, grad);
    st.primal_stationarity[i] = mean_abs(grad);

    const VecD q_new = constraint_residual(model.local_nets[i], ctx);
    if (st.dual_evaluable && !prev_params.empty()) {
      MlpNetwork old_net = model.local_nets[i];
      old_net.params = prev_params[i];
      const VecD q_old = constraint_residual(old_net, ctx);
      double s = 0.0;
      for (std::size_t e = 0; e < q_new.size(); ++e)
        s += std::fabs(q_new[e] - q_old[e]);
      st.dual_stationarity[i] =
          q_new.empty() ? 0.0 : s / static_cast<double>(q_new.size());
    }

    // accumulate per-interface |Q| over both adjacent subdomains
    std::size_t e = 0;
    for (const auto& seg : ctx.segments) {
      const std::size_t n_entries =
          static_cast<std::size_t>(2 * seg.points.rows * seg.ref_values.cols);
      for (std::size_t j = 0; j < n_entries; ++j)
        iface_abs_sum[seg.interface_id] += std::fabs(q_new[e + j]);
      iface_count[seg.interface_id] += static_cast<long>(n_entries);
      e += n_entries;
    }
  }

  for (int e = 0; e < n_iface; ++e)
    st.interface_mean_abs_q[e] =
        iface_count[e] > 0 ? iface_abs_sum[e] / static_cast<double>(iface_count[e])
                           : 0.0;

  bool ok = st.dual_evaluable;
  for (double v : st.primal_stationarity) ok = ok && v <= cfg.eps_pr;
  if (n_iface > 0)
    for (double v : st.dual_stationarity)
      ok = ok && (!std::isnan(v) ? v <= cfg.eps_lambda : false);
  for (double v : st.interface_mean_abs_q) ok = ok && v <= cfg.eps_ij;
  st.converged = ok;
  return st;
}

VecD evaluate_global(const DdmModel& model, std::span<const double> spatial,
                     std::span<const double> zeta) {
  const int sd = model.partition.spatial_dim();
  if (static_cast<int>(spatial.size()) != sd)
    fail(ErrorCode::kShapeMismatch, "point dimension mismatch");
  constexpr double tol = 1e-9;
  for (int a = 0; a < sd; ++a)
    if (spatial[a] < model.partition.bounds.lo[a] - tol ||
        spatial[a] > model.partition.bounds.hi[a] + tol)
      fail(ErrorCode::kOutOfDomain, "point outside the trained domain");

  VecD input(spatial.begin(), spatial.end());
  input.insert(input.end(), zeta.begin(), zeta.end());

  const int iface = model.partition.interface_at(spatial, tol);
  const MlpNetwork& net = iface >= 0
                              ? model.interface_nets[iface]
                              : model.local_nets[model.partition.subdomain_of(spatial)];
  return forward(net, input);
}

VecD predict_raw(const DdmModel& model, std::span<const double> spatial,
                 std::span<const double> zeta) {
  const int sd = model.partition.spatial_dim();
  VecD sp(sd), ze(zeta.size());
  for (int a = 0; a < sd; ++a) sp[a] = model.transform.inputs[a].to_norm(spatial[a]);
  for (std::size_t c = 0; c < zeta.size(); ++c)
    ze[c] = model.transform.inputs[sd + c].to_norm(zeta[c]);
  VecD out = evaluate_global(model, sp, ze);
  for (std::size_t c = 0; c < out.size(); ++c)
    out[c] = model.transform.outputs[c].from_norm(out[c]);
  return out;
}

std::pair<DdmModel, RunReport> run_ddm(const RunConfig& cfg, Dataset dataset) {
  const auto run_t0 = Clock::now();
  if (!dataset.normalized) normalize_in_place(dataset);

  DdmModel model;
  model.splits = cfg.splits;
  model.collocation = cfg.collocation;
  model.transform = dataset.transform;
  model.method = cfg.method;
  model.rho = cfg.rho;
  model.param_samples = unique_param_samples(dataset);

  Box bounds;
  bounds.lo.assign(dataset.spatial_dim, -1.0);
  bounds.hi.assign(dataset.spatial_dim, 1.0);
  model.partition = partition_grid(bounds, cfg.splits, cfg.collocation);

  AssignResult assigned = assign_samples(dataset, model.partition, 1e-9);
  if (cfg.gap_rows > 0) apply_gap(assigned, model.partition, cfg.gap_rows);
  for (const auto& local : assigned.locals)
    if (local.count() == 0)
      fail(ErrorCode::kEmptySubdomain,
           "subdomain " + std::to_string(local.subdomain_id) + " has no samples");
  const std::vector<LocalDataset> locals = std::move(assigned.locals);

  const int n_sub = static_cast<int>(locals.size());
  const int n_iface = static_cast<int>(model.partition.interfaces.size());
  const std::vector<int> widths = net_widths(
      dataset.input_dim(), cfg.hidden_width, cfg.hidden_depth, dataset.out_dim);
  for (int i = 0; i < n_sub; ++i)
    model.local_nets.push_back(
        make_network(widths, Activation::kSwish, local_net_seed(cfg.seed, i)));
  for (int e = 0; e < n_iface; ++e)
    model.interface_nets.push_back(
        make_network(widths, Activation::kSwish, interface_net_seed(cfg.seed, e)));

  model.lambdas.resize(n_sub);
  model.dual_states.resize(n_sub);
  for (int i = 0; i < n_sub; ++i) {
    int entries = 0;
    for (int iface_id : model.partition.interfaces_of(i))
      entries += 2 * model.interface_eval_points(iface_id).rows * dataset.out_dim;
    model.lambdas[i].assign(entries, 0.0);
  }

  RunReport report;
  report.config_echo = config_to_json(cfg);
  report.discarded_samples = assigned.discarded;
  report.interface_gaps = assigned.interface_gaps;
  report.traces.resize(n_sub);

  LbfgsConfig iface_cfg;
  iface_cfg.memory = cfg.lbfgs_memory;
  iface_cfg.max_iters = cfg.interface_fit_iters;
  iface_cfg.grad_tol = cfg.eps_ij;

  InterfacePredictions preds = predict_interfaces(model);

  for (int k = 0; k <= cfg.outer_iters; ++k) {
    PhaseTimings phase;
    model.outer_iter = k;

    std::vector<VecD> prev_params(n_sub);
    for (int i = 0; i < n_sub; ++i) prev_params[i] = model.local_nets[i].params;

    auto t0 = Clock::now();
    run_indexed(n_sub, cfg.workers, [&](int i) {
      solve_subdomain(model, cfg, preds, locals[i], i, k, report.traces[i]);
    });
    phase.solve_ms = ms_since(t0);

    t0 = Clock::now();
    run_indexed(n_iface, cfg.workers, [&](int e) {
      const InterfaceSegment& iface = model.partition.interfaces[e];
      const Mat pts = model.interface_eval_points(e);
      const VecD eta = pad_normal(iface.normal, pts.cols);
      model.interface_nets[e] =
          fit_interface(model.interface_nets[e], model.local_nets[iface.left_id],
                        model.local_nets[iface.right_id], pts, eta, iface_cfg);
    });
    phase.interface_ms = ms_since(t0);

    t0 = Clock::now();
    InterfacePredictions new_preds = predict_interfaces(model);
    phase.predict_ms = ms_since(t0);

    t0 = Clock::now();
    ConvergenceStatus status = check_convergence(model, locals, prev_params,
                                                 new_preds, cfg,
                                                 /*dual_evaluable=*/k >= 1);

    IterationRecord rec;
    rec.k = k;
    rec.subdomain_loss.resize(n_sub);
    for (int i = 0; i < n_sub; ++i) {
      VecD g;
      rec.subdomain_loss[i] =
          mse_loss(model.local_nets[i], locals[i].X, locals[i].U, g);
    }
    rec.status = status;
    report.iterations.push_back(std::move(rec));
    phase.check_ms = ms_since(t0);
    report.timings.push_back(phase);
    report.outer_iterations = k + 1;

    if (cfg.write_checkpoints && !cfg.out_dir.empty())
      save_model(model, cfg.out_dir + "/model.json");

    preds = std::move(new_preds);
    if (status.converged) {
      report.converged = true;
      break;
    }
  }

  report.total_ms = ms_since(run_t0);
  return {std::move(model), std::move(report)};
}

}  // namespace ddnn
