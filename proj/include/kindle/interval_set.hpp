#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kindle/expr.hpp"

namespace kindle {

/// Interval bounds: finite values lie in [-2^62, 2^62]; the int64 extremes
/// stand for -inf and +inf. Results that leave the finite range are widened
/// to the matching infinity (or pulled back to the limit on the other side).
using Bound = std::int64_t;
inline constexpr Bound kNegInf = INT64_MIN;
inline constexpr Bound kPosInf = INT64_MAX;
inline constexpr Bound kBoundLimit = Bound{1} << 62;

struct Interval {
  Bound lo = kNegInf;
  Bound hi = kPosInf;

  bool operator==(const Interval&) const = default;
};

/// Finite disjunction of closed intervals, kept sorted, disjoint and
/// non-adjacent so that equality is structural. Empty means bottom.
class IntervalSet {
 public:
  static constexpr std::size_t kMaxDisjuncts = 16;

  IntervalSet() = default;  // bottom
  static IntervalSet bottom() { return {}; }
  static IntervalSet top() { return range(kNegInf, kPosInf); }
  static IntervalSet singleton(Value v) { return range(v, v); }
  /// Empty if lo > hi.
  static IntervalSet range(Bound lo, Bound hi);
  static IntervalSet from(std::vector<Interval> parts);
  static IntervalSet boolean() { return range(0, 1); }

  const std::vector<Interval>& intervals() const { return parts_; }
  bool is_bottom() const { return parts_.empty(); }
  bool is_top() const { return parts_.size() == 1 && parts_[0].lo == kNegInf && parts_[0].hi == kPosInf; }
  std::optional<Value> singleton_value() const;
  Bound min() const { return parts_.front().lo; }
  Bound max() const { return parts_.back().hi; }
  IntervalSet hull() const;

  bool contains(Value v) const;
  /// Set inclusion: this ⊆ other.
  bool subset_of(const IntervalSet& other) const;

  IntervalSet unite(const IntervalSet& other) const;
  IntervalSet intersect(const IntervalSet& other) const;
  /// Complement within the integers.
  IntervalSet complement() const;

  bool operator==(const IntervalSet&) const = default;

  /// Sound abstract counterparts of the concrete operators. Traps (division
  /// by zero, out-of-range shifts) contribute no values.
  static IntervalSet apply(BinOp op, const IntervalSet& a, const IntervalSet& b);
  static IntervalSet apply(UnOp op, const IntervalSet& a);

 private:
  std::vector<Interval> parts_;
};

std::string to_string(Bound b);
std::string to_string(const IntervalSet& s);

}  // namespace kindle
