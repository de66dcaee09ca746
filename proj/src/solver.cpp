#include "blockprox/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "blockprox/errors.hpp"

namespace blockprox {

namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double t : v) s += t * t;
  return std::sqrt(s);
}

std::uint64_t now_ns() {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(
          std::chrono::steady_clock::now().time_since_epoch())
          .count());
}

}  // namespace

const char* to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::kResidualTolerance: return "residual_tolerance";
    case TerminationReason::kMaxIterations: return "max_iterations";
    case TerminationReason::kStationaryDirection: return "stationary_direction";
  }
  return "unknown";
}

void SolverConfig::validate(std::size_t block_count) const {
  if (!(tau_lo > 0.0) || !(tau_lo <= tau_hi)) {
    throw UsageError("SolverConfig: need 0 < tau_lo <= tau_hi");
  }
  if (!(sufficient_decrease > 0.0)) throw UsageError("SolverConfig: need a > 0");
  if (!(boost_decrease > 0.0)) throw UsageError("SolverConfig: need alpha > 0");
  if (!(tau_backtrack > 0.0 && tau_backtrack < 1.0)) {
    throw UsageError("SolverConfig: need beta in (0,1)");
  }
  if (!(boost_backtrack > 0.0 && boost_backtrack < 1.0)) {
    throw UsageError("SolverConfig: need rho in (0,1)");
  }
  if (!(boost_trial_init >= 1.0)) throw UsageError("SolverConfig: need sigma0 >= 1");
  if (!(boost_trial_growth > 1.0)) throw UsageError("SolverConfig: need delta > 1");
  if (!(trial_init >= tau_lo && trial_init <= tau_hi)) {
    throw UsageError("SolverConfig: trial_init must lie in [tau_lo, tau_hi]");
  }
  if (max_backtracks == 0) throw UsageError("SolverConfig: max_backtracks must be positive");
  if (!(zero_dir_tol >= 0.0)) throw UsageError("SolverConfig: zero_dir_tol must be >= 0");
  if (!(rel_tol >= 0.0)) throw UsageError("SolverConfig: rel_tol must be >= 0");
  cumulative_probs(block_probs, block_count);
}

std::vector<double> cumulative_probs(std::span<const double> probs, std::size_t block_count) {
  std::vector<double> cum(block_count);
  if (probs.empty()) {
    const double p = 1.0 / static_cast<double>(block_count);
    double acc = 0.0;
    for (std::size_t i = 0; i < block_count; ++i) {
      acc += p;
      cum[i] = acc;
    }
    cum.back() = 1.0;
    return cum;
  }
  if (probs.size() != block_count) {
    throw UsageError("block_probs: expected one probability per block");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < block_count; ++i) {
    if (!(probs[i] > 0.0)) throw UsageError("block_probs: probabilities must be positive");
    acc += probs[i];
    cum[i] = acc;
  }
  if (std::abs(acc - 1.0) > 1e-12) throw UsageError("block_probs: must sum to 1");
  return cum;
}

std::size_t pick_block(double u, std::span<const double> cumulative) {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) return cumulative.size() - 1;  // u >= last cumsum (rounding)
  return static_cast<std::size_t>(it - cumulative.begin());
}

double trial_tau(TrialStrategy strategy, bool has_prev, double prev_accepted,
                 double prev_trial, const SolverConfig& cfg, double threshold_i) {
  double raw;
  if (strategy == TrialStrategy::kFixed || !has_prev) {
    raw = cfg.trial_init;
  } else if (strategy == TrialStrategy::kDecreasing) {
    raw = prev_accepted;
  } else {
    raw = prev_accepted < prev_trial ? prev_accepted : prev_accepted / cfg.tau_backtrack;
  }
  double hi = cfg.tau_hi;
  if (std::isfinite(threshold_i)) {
    // The prox is only defined strictly below the threshold.
    hi = std::min(hi, std::nextafter(threshold_i, 0.0));
  }
  const double lo = std::min(cfg.tau_lo, hi);
  return std::clamp(raw, lo, hi);
}

double nonmonotone_reference(std::span<const double> history, std::size_t monotone_window) {
  if (history.empty()) throw UsageError("nonmonotone_reference: empty history");
  const std::size_t window = std::min(monotone_window + 1, history.size());
  double best = history[history.size() - window];
  for (std::size_t j = history.size() - window + 1; j < history.size(); ++j) {
    best = std::max(best, history[j]);
  }
  return best;
}

double self_adaptive_sigma(double sigma, double sigma_bar, const SolverConfig& cfg) {
  if (sigma == sigma_bar) return cfg.boost_trial_growth * sigma_bar;
  return std::max(cfg.boost_trial_init, sigma);
}

void SolverWorkspace::resize(std::size_t block_len) {
  grad.resize(block_len);
  z.resize(block_len);
  candidate.resize(block_len);
  direction.resize(block_len);
  boost_candidate.resize(block_len);
  boost_shift.resize(block_len);
}

ProxGradStep prox_grad_direction(const Problem& p, std::span<const double> x,
                                 std::size_t i, double tau) {
  const auto xi = p.partition->view(x, i);
  ProxGradStep r;
  r.candidate.resize(xi.size());
  r.direction.resize(xi.size());
  std::vector<double> grad(xi.size()), z(xi.size());
  p.smooth->block_grad(x, i, grad);
  for (std::size_t t = 0; t < xi.size(); ++t) z[t] = xi[t] - tau * grad[t];
  p.regularizer->prox_block(i, z, tau, r.candidate);
  for (std::size_t t = 0; t < xi.size(); ++t) r.direction[t] = r.candidate[t] - xi[t];
  return r;
}

BacktrackResult backtrack(const Problem& p, std::span<const double> x, std::size_t i,
                          double tau_bar, double phi_cur, double f_cur, double g_block_cur,
                          double nmls_reference, const SolverConfig& cfg, SolverWorkspace& ws) {
  const auto xi = p.partition->view(x, i);
  ws.resize(xi.size());
  p.smooth->block_grad(x, i, ws.grad);
  const double xi_norm = norm(xi);
  const double zero_cut = cfg.zero_dir_tol * (1.0 + xi_norm);

  double tau = tau_bar;
  std::uint32_t reductions = 0;
  for (;;) {
    for (std::size_t t = 0; t < xi.size(); ++t) ws.z[t] = xi[t] - tau * ws.grad[t];
    p.regularizer->prox_block(i, ws.z, tau, ws.candidate);
    double dir_sq = 0.0;
    for (std::size_t t = 0; t < xi.size(); ++t) {
      ws.direction[t] = ws.candidate[t] - xi[t];
      dir_sq += ws.direction[t] * ws.direction[t];
    }
    const double dir_norm = std::sqrt(dir_sq);

    if (dir_norm <= zero_cut) {
      BacktrackResult r;
      r.stationary = true;
      r.tau = tau;
      r.backtracks = reductions;
      r.dir_norm = dir_norm;
      r.dir_sq = dir_sq;
      return r;
    }

    bool accepted = false;
    double cand_phi = 0.0, cand_f = 0.0, cand_g = 0.0;
    const ExtendedReal g_val = p.regularizer->eval_block(i, ws.candidate);
    if (g_val.is_finite()) {
      cand_g = g_val.value();
      cand_f = p.smooth->eval_candidate(x, i, ws.direction);
      cand_phi = phi_cur + (cand_g - g_block_cur) + (cand_f - f_cur);
      accepted = cand_phi <= nmls_reference - cfg.sufficient_decrease * dir_sq;
    }
    if (accepted) {
      BacktrackResult r;
      r.tau = tau;
      r.backtracks = reductions;
      r.dir_norm = dir_norm;
      r.dir_sq = dir_sq;
      r.cand_phi = cand_phi;
      r.cand_f = cand_f;
      r.cand_g = cand_g;
      return r;
    }
    if (reductions >= cfg.max_backtracks) {
      std::ostringstream msg;
      msg << "backtracking exhausted on block " << i << ": trial tau " << tau_bar
          << " shrunk by beta=" << cfg.tau_backtrack << " through " << reductions
          << " reductions to tau " << tau << " (||d||=" << dir_norm
          << ", phi=" << phi_cur << "); the oracle and objective disagree";
      throw SolverError(msg.str());
    }
    tau *= cfg.tau_backtrack;
    ++reductions;
  }
}

BoostResult boosted_linesearch(const Problem& p, std::span<const double> x, std::size_t i,
                               std::span<const double> d, double dir_sq, double phi_hat,
                               double f_hat, double g_hat, double phi_cur, double f_cur,
                               double g_block_cur, double sigma_bar, const SolverConfig& cfg,
                               SolverWorkspace& ws) {
  const auto xi = p.partition->view(x, i);
  double sigma = sigma_bar;
  BoostResult r;
  while (sigma > 1.0) {
    // Probe x + sigma d. The committed shift is recomputed as
    // (x_i + sigma d) - x_i so the probe and a later commit see the same bits.
    for (std::size_t t = 0; t < xi.size(); ++t) {
      ws.boost_candidate[t] = xi[t] + sigma * d[t];
      ws.boost_shift[t] = ws.boost_candidate[t] - xi[t];
    }
    ++r.attempts;
    const double lambda = sigma - 1.0;
    bool ok = false;
    double bphi = 0.0, bf = 0.0, bg = 0.0;
    const ExtendedReal g_val = p.regularizer->eval_block(i, ws.boost_candidate);
    if (g_val.is_finite()) {
      bg = g_val.value();
      bf = p.smooth->eval_candidate(x, i, ws.boost_shift);
      bphi = phi_cur + (bg - g_block_cur) + (bf - f_cur);
      ok = bphi <= phi_hat - cfg.boost_decrease * lambda * lambda * dir_sq;
    }
    if (ok) {
      r.lambda = lambda;
      r.sigma = sigma;
      r.boosted = true;
      r.phi = bphi;
      r.f = bf;
      r.g = bg;
      return r;
    }
    sigma *= cfg.boost_backtrack;
  }
  r.lambda = 0.0;
  r.sigma = 1.0;
  r.phi = phi_hat;
  r.f = f_hat;
  r.g = g_hat;
  return r;
}

// ---------------------------------------------------------------------------

Solver::Solver(const Problem& p, SolverConfig cfg, std::vector<double> x0)
    : Solver(p, cfg, std::move(x0), Xoshiro256(cfg.seed)) {}

Solver::Solver(const Problem& p, SolverConfig cfg, std::vector<double> x0, Xoshiro256 rng)
    : problem_(p), cfg_(std::move(cfg)), x_(std::move(x0)), rng_(rng),
      sigma_bar_(cfg_.boost_trial_init) {
  const std::size_t n_blocks = p.partition->block_count();
  cfg_.validate(n_blocks);
  if (x_.size() != p.partition->dimension()) {
    throw UsageError("Solver: x0 has wrong dimension");
  }
  cum_probs_ = cumulative_probs(cfg_.block_probs, n_blocks);

  g_blocks_.resize(n_blocks);
  for (std::size_t i = 0; i < n_blocks; ++i) {
    const ExtendedReal gi = p.regularizer->eval_block(i, p.partition->view(point(), i));
    if (!gi.is_finite()) {
      throw UsageError("Solver: x0 lies outside dom g (block " + std::to_string(i) + ")");
    }
    g_blocks_[i] = gi.value();
  }
  f_ = p.smooth->eval(x_);
  phi_ = f_;
  for (double g : g_blocks_) phi_ += g;
  if (!std::isfinite(phi_)) throw UsageError("Solver: objective not finite at x0");

  scale_ = p.stopping_scale > 0.0 ? p.stopping_scale : std::max(1.0, std::abs(phi_));
  phi_window_.push_back(phi_);
  residual_window_.push_back(phi_);
}

IterationRecord Solver::step() {
  const std::uint64_t t0 = now_ns();
  const std::size_t i = pick_block(rng_.uniform01(), cum_probs_);
  const double tau_bar = trial_tau(cfg_.trial_strategy, has_accepted_, prev_accepted_tau_,
                                   prev_trial_tau_, cfg_, problem_.regularizer->threshold(i));

  double reference = phi_;
  if (cfg_.monotone_window > 0) {
    history_scratch_.assign(phi_window_.begin(), phi_window_.end());
    reference = nonmonotone_reference(history_scratch_, cfg_.monotone_window);
  }

  const double phi_before = phi_;
  const double f_before = f_;
  const double g_before = g_blocks_[i];
  const double sigma_bar_used = sigma_bar_;

  BacktrackResult bt = backtrack(problem_, x_, i, tau_bar, phi_before, f_before, g_before,
                                 reference, cfg_, ws_);

  IterationRecord rec;
  rec.k = k_;
  rec.block = static_cast<std::uint32_t>(i);
  rec.tau = bt.tau;
  rec.backtracks = bt.backtracks;
  rec.dir_norm = bt.dir_norm;

  BoostResult boost;
  bool boosted_ran = false;
  if (bt.stationary) {
    ++consecutive_stationary_;
    rec.phi = phi_;
  } else {
    consecutive_stationary_ = 0;
    double new_phi = bt.cand_phi, new_f = bt.cand_f, new_g = bt.cand_g;
    std::span<const double> committed = ws_.candidate;
    if (cfg_.boost_enabled) {
      boost = boosted_linesearch(problem_, x_, i, ws_.direction, bt.dir_sq, bt.cand_phi,
                                 bt.cand_f, bt.cand_g, phi_before, f_before, g_before,
                                 sigma_bar_used, cfg_, ws_);
      boosted_ran = true;
      sigma_bar_ = self_adaptive_sigma(boost.sigma, sigma_bar_used, cfg_);
      rec.lambda = boost.lambda;
      rec.boost_attempts = boost.attempts;
      if (boost.boosted) {
        new_phi = boost.phi;
        new_f = boost.f;
        new_g = boost.g;
        committed = ws_.boost_candidate;
      }
    }
    rec.phi = new_phi;
    rec.elapsed_ns = now_ns() - t0;

    if (observer_ != nullptr) {
      StepDebug dbg;
      dbg.x_before = x_;
      dbg.block = i;
      dbg.trial = tau_bar;
      dbg.nmls_reference = reference;
      dbg.phi_before = phi_before;
      dbg.f_before = f_before;
      dbg.g_block_before = g_before;
      dbg.sigma_bar = sigma_bar_used;
      dbg.backtrack = &bt;
      dbg.boost = boosted_ran ? &boost : nullptr;
      dbg.direction = ws_.direction;
      dbg.committed = committed;
      dbg.record = &rec;
      observer_->on_step(dbg);
    }

    problem_.smooth->commit_block(x_, i, committed);
    auto xi = problem_.partition->view(std::span<double>(x_), i);
    std::copy(committed.begin(), committed.end(), xi.begin());
    g_blocks_[i] = new_g;
    f_ = new_f;
    phi_ = new_phi;

    has_accepted_ = true;
    prev_accepted_tau_ = bt.tau;
    prev_trial_tau_ = tau_bar;
  }

  if (bt.stationary) {
    rec.elapsed_ns = now_ns() - t0;
    if (observer_ != nullptr) {
      StepDebug dbg;
      dbg.x_before = x_;
      dbg.block = i;
      dbg.trial = tau_bar;
      dbg.nmls_reference = reference;
      dbg.phi_before = phi_before;
      dbg.f_before = f_before;
      dbg.g_block_before = g_before;
      dbg.sigma_bar = sigma_bar_used;
      dbg.backtrack = &bt;
      dbg.record = &rec;
      observer_->on_step(dbg);
    }
  }

  ++k_;
  phi_window_.push_back(phi_);
  while (phi_window_.size() > cfg_.monotone_window + 1) phi_window_.pop_front();
  if (cfg_.residual_window > 0) {
    residual_window_.push_back(phi_);
    while (residual_window_.size() > cfg_.residual_window + 1) residual_window_.pop_front();
  }
  return rec;
}

bool Solver::all_blocks_stationary() {
  for (std::size_t i = 0; i < problem_.partition->block_count(); ++i) {
    const double tau = trial_tau(cfg_.trial_strategy, has_accepted_, prev_accepted_tau_,
                                 prev_trial_tau_, cfg_, problem_.regularizer->threshold(i));
    const auto xi = problem_.partition->view(point(), i);
    ws_.resize(xi.size());
    problem_.smooth->block_grad(x_, i, ws_.grad);
    for (std::size_t t = 0; t < xi.size(); ++t) ws_.z[t] = xi[t] - tau * ws_.grad[t];
    problem_.regularizer->prox_block(i, ws_.z, tau, ws_.candidate);
    double dir_sq = 0.0;
    for (std::size_t t = 0; t < xi.size(); ++t) {
      const double d = ws_.candidate[t] - xi[t];
      dir_sq += d * d;
    }
    if (std::sqrt(dir_sq) > cfg_.zero_dir_tol * (1.0 + norm(xi))) return false;
  }
  return true;
}

SolveResult Solver::run() {
  SolveResult result;
  // Stationarity is only declared after the residual window had its chance,
  // and is confirmed by a sweep over every block.
  const std::size_t stationary_patience =
      std::max(problem_.partition->block_count(), cfg_.residual_window + 1);

  TerminationReason reason = TerminationReason::kMaxIterations;
  std::uint64_t last_traced = std::numeric_limits<std::uint64_t>::max();
  IterationRecord last_rec;
  bool have_rec = false;

  while (k_ < cfg_.max_iters) {
    const IterationRecord rec = step();
    last_rec = rec;
    have_rec = true;
    if (cfg_.trace_stride > 0 && rec.k % cfg_.trace_stride == 0) {
      result.trace.push_back(rec);
      last_traced = rec.k;
    }

    if (cfg_.residual_window > 0 && k_ >= cfg_.residual_window) {
      const double drop = std::abs(residual_window_.front() - residual_window_.back());
      if (drop <= cfg_.rel_tol * scale_) {
        reason = TerminationReason::kResidualTolerance;
        break;
      }
    }
    if (consecutive_stationary_ >= stationary_patience && all_blocks_stationary()) {
      reason = TerminationReason::kStationaryDirection;
      break;
    }
  }

  if (cfg_.trace_stride > 0 && have_rec && last_traced != last_rec.k) {
    result.trace.push_back(last_rec);
  }
  result.iterations = k_;
  result.reason = reason;
  result.phi = phi_;
  result.x = std::move(x_);
  return result;
}

}  // namespace blockprox
