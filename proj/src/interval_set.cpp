#include "kindle/interval_set.hpp"

#include <algorithm>

namespace kindle {

namespace {

using Ext = __int128;
constexpr Ext kInf = Ext{1} << 100;

Ext ext(Bound b) {
  if (b == kNegInf) return -kInf;
  if (b == kPosInf) return kInf;
  return b;
}

Bound lower(Ext x) {
  if (x < -Ext{kBoundLimit}) return kNegInf;
  if (x > kBoundLimit) return kBoundLimit;
  return static_cast<Bound>(x);
}

Bound upper(Ext x) {
  if (x > kBoundLimit) return kPosInf;
  if (x < -Ext{kBoundLimit}) return -kBoundLimit;
  return static_cast<Bound>(x);
}

bool is_inf(Ext x) { return x >= kInf || x <= -kInf; }
int sign(Ext x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

Ext mul(Ext a, Ext b) {
  if (a == 0 || b == 0) return 0;
  if (is_inf(a) || is_inf(b)) return sign(a) * sign(b) * kInf;
  return a * b;
}

// Truncating division, b != 0.
Ext tdiv(Ext a, Ext b) {
  if (is_inf(a) && is_inf(b)) return sign(a) * sign(b);
  if (is_inf(b)) return 0;
  if (is_inf(a)) return sign(a) * sign(b) * kInf;
  return a / b;
}

// Floor division by a positive b.
Ext fdiv(Ext a, Ext b) {
  if (is_inf(a)) return is_inf(b) ? sign(a) : a;
  if (is_inf(b)) return a < 0 ? -1 : 0;
  Ext q = a / b;
  if (a % b != 0 && a < 0) --q;
  return q;
}

IntervalSet make(Ext lo, Ext hi) { return IntervalSet::range(lower(lo), upper(hi)); }

template <typename F>
IntervalSet corners(const Interval& a, const Interval& b, F f) {
  Ext v[4] = {f(ext(a.lo), ext(b.lo)), f(ext(a.lo), ext(b.hi)), f(ext(a.hi), ext(b.lo)), f(ext(a.hi), ext(b.hi))};
  return make(*std::min_element(v, v + 4), *std::max_element(v, v + 4));
}

int bit_length(Bound v) {
  int n = 0;
  while (v > 0) {
    ++n;
    v >>= 1;
  }
  return n;
}

IntervalSet truth(bool can_be_false, bool can_be_true) {
  if (can_be_false && can_be_true) return IntervalSet::boolean();
  if (can_be_true) return IntervalSet::singleton(1);
  if (can_be_false) return IntervalSet::singleton(0);
  return IntervalSet::bottom();
}

IntervalSet pair_op(BinOp op, const Interval& a, const Interval& b) {
  Ext alo = ext(a.lo), ahi = ext(a.hi), blo = ext(b.lo), bhi = ext(b.hi);
  switch (op) {
    case BinOp::Add: return make(alo + blo, ahi + bhi);
    case BinOp::Mul: return corners(a, b, mul);
    case BinOp::Div:
      if (blo <= 0 && bhi >= 0) return IntervalSet::top();
      return corners(a, b, tdiv);
    case BinOp::Mod: {
      if (blo <= 0 && bhi >= 0) return IntervalSet::top();
      Ext mag_min = blo > 0 ? blo : -bhi;
      Ext mag_max = blo > 0 ? bhi : -blo;
      if (alo >= 0 && ahi < mag_min) return make(alo, ahi);
      if (alo == ahi && mag_min == mag_max && !is_inf(alo)) {
        Ext r = alo % mag_min;
        if (r < 0) r += mag_min;
        return make(r, r);
      }
      return make(0, is_inf(mag_max) ? kInf : mag_max - 1);
    }
    case BinOp::Shl: {
      Ext slo = std::max<Ext>(blo, 0), shi = std::min<Ext>(bhi, 62);
      if (slo > shi) return IntervalSet::bottom();
      Interval pow{Bound{1} << static_cast<int>(slo), Bound{1} << static_cast<int>(shi)};
      if (shi > 61) pow.hi = kPosInf;
      return corners(a, pow, mul);
    }
    case BinOp::Shr: {
      Ext slo = std::max<Ext>(blo, 0), shi = std::min<Ext>(bhi, 62);
      if (slo > shi) return IntervalSet::bottom();
      Interval pow{Bound{1} << static_cast<int>(slo), Bound{1} << static_cast<int>(shi)};
      return corners(a, pow, fdiv);
    }
    case BinOp::BitAnd:
      if (alo >= 0 && blo >= 0) return make(0, std::min(ahi, bhi));
      if (alo >= 0) return make(0, ahi);
      if (blo >= 0) return make(0, bhi);
      if (ahi < 0 && bhi < 0) return make(-kInf, std::min(ahi, bhi));
      return IntervalSet::top();
    case BinOp::BitOr:
    case BinOp::BitXor: {
      if (alo < 0 || blo < 0) return IntervalSet::top();
      if (is_inf(ahi) || is_inf(bhi)) return make(op == BinOp::BitOr ? std::max(alo, blo) : 0, kInf);
      int bits = bit_length(static_cast<Bound>(std::max(ahi, bhi)));
      Ext hi = (Ext{1} << bits) - 1;
      return make(op == BinOp::BitOr ? std::max(alo, blo) : 0, hi);
    }
    case BinOp::Eq: return truth(!(alo == ahi && blo == bhi && alo == blo), !(ahi < blo || bhi < alo));
    case BinOp::Lt: return truth(ahi >= blo, alo < bhi);
    default: break;
  }
  return IntervalSet::top();
}

bool both_singletons(const IntervalSet& a, const IntervalSet& b) {
  return a.singleton_value() && b.singleton_value();
}

// Operators whose corner rules are imprecise on points; nullopt defers to the general case.
std::optional<IntervalSet> exact(BinOp op, Value x, Value y) {
  switch (op) {
    case BinOp::Div:
      if (y == 0) return IntervalSet::top();
      return IntervalSet::singleton(x / y);
    case BinOp::Mod: {
      if (y == 0) return IntervalSet::top();
      Value r = x % y;
      if (r < 0) r += y < 0 ? -y : y;
      return IntervalSet::singleton(r);
    }
    case BinOp::Shr:
      if (y < 0 || y > 62) return IntervalSet::bottom();
      return IntervalSet::singleton(x >> y);
    case BinOp::BitAnd: return IntervalSet::singleton(x & y);
    case BinOp::BitOr: return IntervalSet::singleton(x | y);
    case BinOp::BitXor: return IntervalSet::singleton(x ^ y);
    case BinOp::Eq: return IntervalSet::singleton(x == y);
    case BinOp::Lt: return IntervalSet::singleton(x < y);
    case BinOp::LogAnd: return IntervalSet::singleton(x != 0 && y != 0);
    case BinOp::LogOr: return IntervalSet::singleton(x != 0 || y != 0);
    default: return std::nullopt;
  }
}

}  // namespace

IntervalSet IntervalSet::range(Bound lo, Bound hi) {
  IntervalSet s;
  if (lo == kPosInf || hi == kNegInf) return s;
  lo = lower(ext(lo));
  hi = upper(ext(hi));
  if (ext(lo) <= ext(hi)) s.parts_.push_back(Interval{lo, hi});
  return s;
}

IntervalSet IntervalSet::from(std::vector<Interval> parts) {
  IntervalSet s;
  std::erase_if(parts, [](const Interval& i) { return i.lo > i.hi; });
  std::sort(parts.begin(), parts.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  for (const auto& p : parts) {
    if (!s.parts_.empty() && ext(p.lo) <= ext(s.parts_.back().hi) + 1) {
      s.parts_.back().hi = std::max(s.parts_.back().hi, p.hi);
    } else {
      s.parts_.push_back(p);
    }
  }
  if (s.parts_.size() > kMaxDisjuncts) return s.hull();
  return s;
}

std::optional<Value> IntervalSet::singleton_value() const {
  if (parts_.size() == 1 && parts_[0].lo == parts_[0].hi && parts_[0].lo != kNegInf && parts_[0].lo != kPosInf)
    return parts_[0].lo;
  return std::nullopt;
}

IntervalSet IntervalSet::hull() const {
  if (parts_.empty()) return {};
  IntervalSet s;
  s.parts_.push_back(Interval{parts_.front().lo, parts_.back().hi});
  return s;
}

bool IntervalSet::contains(Value v) const {
  Ext x = v;
  for (const auto& p : parts_)
    if (ext(p.lo) <= x && x <= ext(p.hi)) return true;
  return false;
}

bool IntervalSet::subset_of(const IntervalSet& other) const {
  for (const auto& p : parts_) {
    bool inside = false;
    for (const auto& q : other.parts_) {
      if (ext(q.lo) <= ext(p.lo) && ext(p.hi) <= ext(q.hi)) {
        inside = true;
        break;
      }
    }
    if (!inside) return false;
  }
  return true;
}

IntervalSet IntervalSet::unite(const IntervalSet& other) const {
  std::vector<Interval> all = parts_;
  all.insert(all.end(), other.parts_.begin(), other.parts_.end());
  return from(std::move(all));
}

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
  std::vector<Interval> out;
  for (const auto& p : parts_) {
    for (const auto& q : other.parts_) {
      Bound lo = ext(p.lo) > ext(q.lo) ? p.lo : q.lo;
      Bound hi = ext(p.hi) < ext(q.hi) ? p.hi : q.hi;
      if (ext(lo) <= ext(hi)) out.push_back(Interval{lo, hi});
    }
  }
  return from(std::move(out));
}

IntervalSet IntervalSet::complement() const {
  if (parts_.empty()) return top();
  std::vector<Interval> out;
  Ext cursor = -kInf;
  bool open = true;  // cursor is -inf and nothing has been covered yet
  for (const auto& p : parts_) {
    if (p.lo != kNegInf) {
      Ext end = ext(p.lo) - 1;
      out.push_back(Interval{open ? kNegInf : lower(cursor), upper(end)});
    }
    open = false;
    if (p.hi == kPosInf) return from(std::move(out));
    cursor = ext(p.hi) + 1;
  }
  out.push_back(Interval{lower(cursor), kPosInf});
  return from(std::move(out));
}

IntervalSet IntervalSet::apply(BinOp op, const IntervalSet& a, const IntervalSet& b) {
  if (a.is_bottom() || b.is_bottom()) return {};
  if (op == BinOp::Union) return a.unite(b);
  if (both_singletons(a, b)) {
    if (auto r = exact(op, *a.singleton_value(), *b.singleton_value())) return *r;
  }
  switch (op) {
    case BinOp::LogAnd: {
      bool a_true = !a.subset_of(singleton(0)), a_false = a.contains(0);
      bool b_true = !b.subset_of(singleton(0)), b_false = b.contains(0);
      return truth(a_false || b_false, a_true && b_true);
    }
    case BinOp::LogOr: {
      bool a_true = !a.subset_of(singleton(0)), a_false = a.contains(0);
      bool b_true = !b.subset_of(singleton(0)), b_false = b.contains(0);
      return truth(a_false && b_false, a_true || b_true);
    }
    case BinOp::Div:
    case BinOp::Mod:
      if (b.contains(0)) return top();
      break;
    default: break;
  }
  const IntervalSet& x = a.intervals().size() * b.intervals().size() > 64 ? a.hull() : a;
  const IntervalSet& y = a.intervals().size() * b.intervals().size() > 64 ? b.hull() : b;
  std::vector<Interval> out;
  for (const auto& p : x.intervals()) {
    for (const auto& q : y.intervals()) {
      auto r = pair_op(op, p, q);
      out.insert(out.end(), r.intervals().begin(), r.intervals().end());
    }
  }
  return from(std::move(out));
}

IntervalSet IntervalSet::apply(UnOp op, const IntervalSet& a) {
  if (a.is_bottom()) return {};
  switch (op) {
    case UnOp::LogNot: return truth(!a.subset_of(singleton(0)), a.contains(0));
    case UnOp::Neg:
    case UnOp::BitNot: {
      Ext shift = op == UnOp::BitNot ? 1 : 0;
      std::vector<Interval> out;
      for (const auto& p : a.intervals()) {
        auto r = make(-ext(p.hi) - shift, -ext(p.lo) - shift);
        out.insert(out.end(), r.intervals().begin(), r.intervals().end());
      }
      return from(std::move(out));
    }
  }
  return top();
}

std::string to_string(Bound b) {
  if (b == kNegInf) return "-inf";
  if (b == kPosInf) return "+inf";
  return std::to_string(b);
}

std::string to_string(const IntervalSet& s) {
  if (s.is_bottom()) return "{}";
  std::string out;
  for (const auto& p : s.intervals()) {
    if (!out.empty()) out += " v ";
    out += "[" + to_string(p.lo) + "," + to_string(p.hi) + "]";
  }
  return out;
}

}  // namespace kindle
