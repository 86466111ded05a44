#include "kindle/kinduction.hpp"

#include <filesystem>
#include <fstream>

namespace kindle {

std::string to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::True: return "TRUE";
    case VerdictKind::False: return "FALSE";
    case VerdictKind::Unknown: return "UNKNOWN";
  }
  return "?";
}

std::string to_string(ProofSource s) {
  switch (s) {
    case ProofSource::None: return "none";
    case ProofSource::ForwardCondition: return "forward-condition";
    case ProofSource::Induction: return "induction";
    case ProofSource::InvariantEngine: return "invariant-engine";
  }
  return "?";
}

std::string to_string(UnknownReason r) {
  switch (r) {
    case UnknownReason::None: return "none";
    case UnknownReason::KMaxExhausted: return "k_max-exhausted";
    case UnknownReason::Timeout: return "timeout";
    case UnknownReason::SolverUnknown: return "solver-unknown";
  }
  return "?";
}

InvariantSnapshot get_currently_known_invariant(const InvariantSource& source) {
  return source.get_currently_known_invariant();
}

namespace {

class Run {
 public:
  Run(const NormalizedCfa& ncfa, const KInductionConfig& cfg, const InvariantSource& inv)
      : ncfa_(ncfa), cfg_(cfg), inv_(inv), ts_(ncfa), base_(solver_config()), step_(solver_config()) {
    deadline_ = std::chrono::steady_clock::now() + cfg.timeout;
    base_.assert_formula(t_and(ts_.pre_defs()));
  }

  Verdict go() {
    std::size_t k = std::max<std::size_t>(cfg_.k_init, 1);
    while (k <= cfg_.k_max) {
      if (auto v = poll(k)) return *v;
      if (auto v = base_case(k)) return *v;
      if (timed_out()) return unknown(UnknownReason::Timeout, k);
      if (covers(k - 1) && forward_condition(k) == CheckResult::Unsat) {
        Verdict v = done(VerdictKind::True, k);
        v.source = ProofSource::ForwardCondition;
        return v;
      }
      if (auto v = poll(k)) return *v;
      if (timed_out()) return unknown(UnknownReason::Timeout, k);
      if (covers(k - 1))
        if (auto v = step_case(k)) return *v;
      if (timed_out()) return unknown(UnknownReason::Timeout, k);
      std::size_t next = cfg_.inc(k);
      if (next <= k) throw Error("inc must be strictly increasing");
      k = next;
    }
    return unknown(saw_unknown_ ? UnknownReason::SolverUnknown : UnknownReason::KMaxExhausted, cfg_.k_max);
  }

 private:
  SolverConfig solver_config() const {
    SolverConfig c = cfg_.solver;
    c.timeout = std::min(c.timeout, cfg_.timeout);
    return c;
  }

  bool timed_out() const { return std::chrono::steady_clock::now() > deadline_; }

  bool covers(std::size_t n) const { return covered_ && *covered_ >= n; }

  Verdict done(VerdictKind kind, std::size_t k) const {
    Verdict v;
    v.kind = kind;
    v.final_k = k;
    v.invariant_version = version_;
    v.step_checks = step_checks_;
    return v;
  }

  Verdict unknown(UnknownReason reason, std::size_t k) const {
    Verdict v = done(VerdictKind::Unknown, k);
    v.reason = reason;
    return v;
  }

  std::optional<Verdict> poll(std::size_t k) {
    InvariantSnapshot snap = get_currently_known_invariant(inv_);
    if (!snap.proved_safe) return std::nullopt;
    version_ = snap.version;
    Verdict v = done(VerdictKind::True, k);
    v.source = ProofSource::InvariantEngine;
    return v;
  }

  void dump(const std::string& name, const std::function<Formula()>& f) {
    if (cfg_.dump_smt_dir.empty()) return;
    std::filesystem::create_directories(cfg_.dump_smt_dir);
    std::ofstream(std::filesystem::path(cfg_.dump_smt_dir) / (name + ".smt2")) << to_smt_script({f()});
  }

  void extend_base(std::size_t frames) {
    while (base_frames_ <= frames) {
      base_.assert_formula(t_and(ts_.defs(base_frames_)));
      ++base_frames_;
    }
  }

  std::optional<Verdict> counterexample(std::size_t k) {
    Trace trace;
    try {
      trace = extract_trace(base_.model(), ts_, k);
    } catch (const EncodingError&) {
      // never report an alarm that does not replay
      saw_unknown_ = true;
      return std::nullopt;
    }
    Verdict v = done(VerdictKind::False, k);
    v.trace_iterations = loop_iterations(trace, ncfa_.loop_head);
    v.trace = std::move(trace);
    return v;
  }

  std::optional<Verdict> base_case(std::size_t k) {
    extend_base(k);
    dump("base-k" + std::to_string(k), [&] { return encode_base_case(ts_, k); });
    if (!cfg_.base_omission) {
      std::vector<Formula> cases;
      for (std::size_t n = 0; n <= k; ++n) cases.push_back(encode_violation_at(ts_, n));
      CheckResult r = base_.check(t_or(cases), true);
      if (r == CheckResult::Sat) return counterexample(k);
      if (r == CheckResult::Unsat)
        covered_ = covered_ ? std::max(*covered_, k) : k;
      else
        saw_unknown_ = true;
      return std::nullopt;
    }
    for (std::size_t n = covered_ ? *covered_ + 1 : 0; n <= k; ++n) {
      CheckResult r = base_.check(encode_violation_at(ts_, n), true);
      if (r == CheckResult::Sat) {
        if (auto v = counterexample(k)) return v;
        return std::nullopt;
      }
      if (r == CheckResult::Unknown) {
        saw_unknown_ = true;
        return std::nullopt;
      }
      covered_ = n;
    }
    return std::nullopt;
  }

  CheckResult forward_condition(std::size_t k) {
    extend_base(k);
    dump("forward-k" + std::to_string(k), [&] { return encode_forward_condition(ts_, k); });
    std::vector<Formula> path{ts_.init()};
    for (std::size_t i = 0; i < k; ++i) path.push_back(ts_.trans(i));
    CheckResult r = base_.check(t_and(path));
    if (r == CheckResult::Unknown) saw_unknown_ = true;
    return r;
  }

  std::optional<Verdict> step_case(std::size_t k) {
    while (step_.depth() > 0) step_.pop();
    Formula frames = encode_step_frames(ts_, k, cfg_.havoc);
    step_.push();
    step_.assert_formula(frames);
    std::optional<std::uint64_t> checked;
    for (;;) {
      if (auto v = poll(k)) return v;
      if (timed_out()) return std::nullopt;
      InvariantSnapshot snap = get_currently_known_invariant(inv_);
      if (checked && *checked == snap.version) return std::nullopt;
      checked = snap.version;
      version_ = snap.version;
      Formula inv = encode_step_invariant(ts_, k, snap.formula);
      dump("step-k" + std::to_string(k) + "-v" + std::to_string(snap.version), [&] { return t_and(frames, inv); });
      CheckResult r = step_.check_assuming(inv);
      ++step_checks_;
      if (cfg_.on_step) cfg_.on_step(k, frames, inv, r);
      if (r == CheckResult::Unsat) {
        Verdict v = done(VerdictKind::True, k);
        v.source = ProofSource::Induction;
        return v;
      }
      if (r == CheckResult::Unknown) saw_unknown_ = true;
    }
  }

  const NormalizedCfa& ncfa_;
  const KInductionConfig& cfg_;
  const InvariantSource& inv_;
  TransitionSystem ts_;
  SmtSession base_;
  SmtSession step_;
  std::chrono::steady_clock::time_point deadline_;
  std::size_t base_frames_ = 0;
  std::optional<std::size_t> covered_;
  std::uint64_t version_ = 0;
  std::size_t step_checks_ = 0;
  bool saw_unknown_ = false;
};

}  // namespace

Verdict verify(const NormalizedCfa& ncfa, const KInductionConfig& cfg, const InvariantSource& invariants) {
  Run run(ncfa, cfg, invariants);
  return run.go();
}

}  // namespace kindle
