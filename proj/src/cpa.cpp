#include "kindle/cpa.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace kindle {

AbstractState initial_state(const NormalizedCfa& ncfa) {
  return AbstractState(ncfa.cfa.entry, ncfa.cfa.vars.size());
}

CpaResult cpa_algorithm(const NormalizedCfa& ncfa, const AbstractState& init, const Precision& prec,
                        const CpaBudget& budget) {
  const Cfa& cfa = ncfa.cfa;
  auto rpo = reverse_postorder(cfa);
  std::vector<AbstractState> pool;
  std::vector<std::vector<std::size_t>> reached(cfa.num_locations);
  std::set<std::pair<std::size_t, std::size_t>> waitlist;  // (rpo, pool id)

  CpaResult result;
  auto add = [&](AbstractState s) {
    Loc l = s.loc;
    pool.push_back(std::move(s));
    std::size_t id = pool.size() - 1;
    reached[l].push_back(id);
    waitlist.emplace(rpo[l], id);
    return id;
  };

  if (!init.is_bottom()) add(init);
  std::size_t iterations = 0;
  while (!waitlist.empty()) {
    if (budget.stop.stop_requested() || pool.size() > budget.max_states ||
        ((++iterations & 63) == 0 && std::chrono::steady_clock::now() > budget.deadline)) {
      result.complete = false;
      break;
    }
    auto [order, id] = *waitlist.begin();
    waitlist.erase(waitlist.begin());
    AbstractState current = pool[id];
    for (auto eid : cfa.out_edges(current.loc)) {
      AbstractState next = transfer(current, cfa.edges[eid], prec);
      if (next.is_bottom()) continue;
      Loc l = next.loc;
      bool at_head = l == ncfa.loop_head;
      auto here = reached[l];
      for (auto rid : here) {
        const AbstractState& old = pool[rid];
        if (differ(old, next, prec)) continue;
        AbstractState merged = at_head ? merge(old, next, prec) : union_states(old, next);
        if (merged == old) continue;
        auto pos = std::find(reached[l].begin(), reached[l].end(), rid);
        reached[l].erase(pos);
        waitlist.erase({rpo[l], rid});
        add(std::move(merged));
      }
      bool covered = std::any_of(reached[l].begin(), reached[l].end(),
                                 [&](std::size_t rid) { return covers(pool[rid], next); });
      if (!covered) add(std::move(next));
    }
  }
  result.states_created = pool.size();
  for (Loc l = 0; l < cfa.num_locations; ++l)
    for (auto id : reached[l]) result.reached.push_back(pool[id]);
  return result;
}

std::string dump_reached(const CpaResult& result, const std::vector<std::string>& names) {
  std::ostringstream os;
  if (!result.complete) os << "# incomplete\n";
  for (const auto& s : result.reached) os << s.to_string(names) << "\n";
  return os.str();
}

}  // namespace kindle
