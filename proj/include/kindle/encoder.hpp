#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kindle/formula.hpp"
#include "kindle/interp.hpp"
#include "kindle/loop_transform.hpp"
#include "kindle/smt.hpp"

namespace kindle {

class EncodingError : public Error {
 public:
  using Error::Error;
};

enum class HavocStrategy { SoundAll, SoundLoopModified, UnsoundTerminationVars };

std::string to_string(HavocStrategy s);

struct EncodedTerm {
  /// Integer-sorted; truth values are 0/1.
  TermPtr value;
  /// Holds iff evaluation does not trap.
  Formula def;
};

/// Integer term for `e`, with variable `v` read as `env[v]`.
EncodedTerm encode_expr(const Expr& e, const std::vector<TermPtr>& env);

/// Guarded SSA encoding of one acyclic region of the CFA.
struct RegionEncoding {
  /// Definitions of the auxiliary symbols; must be asserted with any use.
  std::vector<Formula> defs;
  /// The region reaches its sink (the loop head).
  Formula reach_end;
  /// Value of every variable on arrival at the sink.
  std::vector<TermPtr> end_env;
  Formula reach_error;
};

/// I, T and P of the normalized program. One frame is the environment at a
/// loop-head visit; code before the first visit is folded into I, and all code
/// reachable from the head without returning to it belongs to one iteration.
///
/// Frame symbols are named `x@i`. Auxiliaries are `x@i.L<loc>` (merge),
/// `x@i.a<edge>` (assignment), `x@i.h<edge>` (havoc) and `reach@i.<loc>`;
/// the pre-loop region uses `p` in place of the frame number and reads
/// uninitialized variables as `x@init`.
class TransitionSystem {
 public:
  explicit TransitionSystem(const NormalizedCfa& ncfa);

  const NormalizedCfa& ncfa() const { return *ncfa_; }
  std::size_t num_vars() const { return ncfa_->cfa.vars.size(); }

  TermPtr var_at(VarId v, std::size_t frame) const;
  /// Program variables of `f` replaced by their frame-`frame` symbols.
  Formula at_frame(const Formula& f, std::size_t frame) const;

  const std::vector<Formula>& pre_defs() const { return pre_.defs; }
  /// Loop-head value of `v` after the pre-loop code.
  const TermPtr& pre_value(VarId v) const { return pre_.end_env[v]; }
  const Formula& pre_reaches_head() const { return pre_.reach_end; }

  /// I(s0), over frame 0 plus pre-loop auxiliaries.
  Formula init() const;
  /// The pre-loop code itself reaches the error location.
  Formula init_error() const { return pre_.reach_error; }

  const std::vector<Formula>& defs(std::size_t frame);
  /// T(s_i, s_{i+1}).
  Formula trans(std::size_t frame);
  /// P(s_i).
  Formula prop(std::size_t frame);
  /// Dispatch variable within its valid range; true for fewer than two loops.
  Formula pc_range(std::size_t frame) const;

 private:
  RegionEncoding& frame(std::size_t i);

  const NormalizedCfa* ncfa_;
  RegionEncoding pre_;
  std::map<std::size_t, RegionEncoding> frames_;
};

/// Encodes the region starting at `start` with environment `env`; paths stop at
/// the loop head (other than at the start itself) and at locations without
/// successors. `tag` names the auxiliaries.
RegionEncoding encode_region(const NormalizedCfa& ncfa, Loc start, const std::vector<TermPtr>& env,
                             const std::string& tag);

/// Definitions needed by any query over frames [0, frames].
Formula base_defs(TransitionSystem& ts, std::size_t frames);

/// Violation at exactly `n` completed iterations (n = 0 includes the pre-loop code).
Formula encode_violation_at(TransitionSystem& ts, std::size_t n);

/// A violation within 0..k iterations.
Formula encode_base_case(TransitionSystem& ts, std::size_t k);

/// Some execution completes k iterations.
Formula encode_forward_condition(TransitionSystem& ts, std::size_t k);

/// The part of the step case that does not depend on the invariant.
Formula encode_step_frames(TransitionSystem& ts, std::size_t k, HavocStrategy strategy);
/// The invariant asserted at every frame 0..k.
Formula encode_step_invariant(TransitionSystem& ts, std::size_t k, const Formula& inv);

Formula encode_step_case(TransitionSystem& ts, std::size_t k, const Formula& inv, HavocStrategy strategy);

/// Replays the havoc choices recorded in a base-case model through the
/// interpreter. Throws EncodingError if the replay does not reach the error.
Trace extract_trace(const Model& model, const TransitionSystem& ts, std::size_t k);

}  // namespace kindle
