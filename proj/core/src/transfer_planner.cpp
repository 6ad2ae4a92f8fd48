/* Copyright 2026 The offload-tuner Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "offload/transfer_planner.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

namespace offload {

std::string_view to_string(TransferDirection direction) noexcept {
  return direction == TransferDirection::host_to_device ? "host_to_device" : "device_to_host";
}

std::string_view to_string(AnchorPosition position) noexcept {
  return position == AnchorPosition::before ? "before" : "after";
}

std::size_t TransferPlan::batch_count() const {
  std::set<std::pair<std::optional<std::string>, AnchorPosition>> keys;
  for (const auto& e : entries) keys.emplace(e.anchor_loop, e.position);
  return keys.size();
}

std::uint64_t anchor_executions(const ProgramModel& model, const TransferEntry& entry) {
  if (!entry.anchor_loop) return 1;
  auto idx = model.find_loop(*entry.anchor_loop);
  if (!idx) return 0;
  auto parent = model.parent_of(*idx);
  return parent ? model.loop(*parent).iteration_count : 1;
}

namespace {

constexpr std::ptrdiff_t kTop = -1;
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

enum class Side { host, device };

struct Anchor {
  std::ptrdiff_t loop = kTop;
  AnchorPosition position = AnchorPosition::before;

  friend auto operator<=>(const Anchor&, const Anchor&) = default;
};

using Entry = std::pair<Anchor, TransferDirection>;
using EntrySet = std::set<Entry>;

struct Use {
  std::size_t loop;
  AccessKind kind;
  Side side;
};

struct Event {
  bool is_access = false;
  std::size_t access = 0;
  Anchor anchor;
};

struct ReplayState {
  std::vector<bool> host_fresh;    // before each event
  std::vector<bool> device_fresh;  // before each event
  std::vector<bool> stale;         // reads only
};

// Plans one variable. The variable's use sites are unrolled into a dynamic
// event trace (each loop body twice), and candidate copies are checked by
// replaying the trace with version counters.
class VariablePlanner {
 public:
  VariablePlanner(const ProgramModel& model, std::span<const ResolvedAccess> accesses,
                  const std::vector<bool>& placed)
      : model_(model) {
    for (const auto& a : accesses)
      uses_.push_back({a.loop, a.kind, placed[a.loop] ? Side::device : Side::host});
    unroll(kTop, 0, uses_.size());
    last_write_.resize(events_.size(), kNone);
    std::size_t last = kNone;
    for (std::size_t k = 0; k < events_.size(); ++k) {
      last_write_[k] = last;
      const auto& ev = events_[k];
      if (ev.is_access && uses_[ev.access].kind == AccessKind::write) last = ev.access;
      if (!ev.is_access) at_anchor_[ev.anchor].push_back(k);
    }
  }

  bool touches_device() const {
    return std::any_of(uses_.begin(), uses_.end(), [](const Use& u) { return u.side == Side::device; });
  }

  EntrySet plan() {
    EntrySet plan;

    // Device results read later on the host.
    for (const auto& ev : events_) {
      if (!ev.is_access) continue;
      const auto& u = uses_[ev.access];
      if (u.side != Side::host || u.kind != AccessKind::read) continue;
      const std::size_t k = static_cast<std::size_t>(&ev - events_.data());
      const std::size_t w = last_write_[k];
      if (w != kNone && uses_[w].side == Side::device)
        plan.insert({{hoist_back(uses_[w].loop, kNone), AnchorPosition::after},
                     TransferDirection::device_to_host});
    }

    // Host data read on the device, fixed one stale read at a time.
    const std::size_t guard = events_.size() + 1;
    for (std::size_t round = 0;; ++round) {
      const auto st = replay(plan);
      const std::size_t k = first_stale_device_read(st);
      if (k == kNone) break;
      if (round > guard) throw std::logic_error("transfer planner failed to converge");
      const std::size_t loop = uses_[events_[k].access].loop;
      if (auto a = hoist_forward(loop, st)) {
        plan.insert({{*a, AnchorPosition::before}, TransferDirection::host_to_device});
        continue;
      }
      // No enclosing loop sees a current host copy on every entry; refresh the
      // host right after the device writes that made it stale.
      for (std::size_t e : events_at({static_cast<std::ptrdiff_t>(loop), AnchorPosition::before})) {
        const std::size_t w = last_write_[e];
        if (!st.host_fresh[e] && w != kNone && uses_[w].side == Side::device)
          plan.insert({{hoist_back(uses_[w].loop, loop), AnchorPosition::after},
                       TransferDirection::device_to_host});
      }
      plan.insert({{static_cast<std::ptrdiff_t>(loop), AnchorPosition::before},
                   TransferDirection::host_to_device});
      if (replay(plan).stale[k]) throw std::logic_error("transfer planner could not cover a read");
    }
    if (any_stale(replay(plan))) throw std::logic_error("transfer plan is unsound");

    // Drop anything made redundant, innermost anchors first.
    std::vector<Entry> order(plan.begin(), plan.end());
    std::stable_sort(order.begin(), order.end(), [&](const Entry& a, const Entry& b) {
      return depth(a.first.loop) > depth(b.first.loop);
    });
    for (const auto& e : order) {
      EntrySet trial = plan;
      trial.erase(e);
      if (!any_stale(replay(trial))) plan = std::move(trial);
    }
    return plan;
  }

 private:
  // Emits the events of `node`'s subtree for uses [begin, end).
  void unroll(std::ptrdiff_t node, std::size_t begin, std::size_t end) {
    const bool is_loop = node != kTop;
    events_.push_back({false, 0, {node, AnchorPosition::before}});
    for (int iter = 0; iter < (is_loop ? 2 : 1); ++iter) {
      std::size_t i = begin;
      while (i < end) {
        const std::size_t l = uses_[i].loop;
        if (is_loop && l == static_cast<std::size_t>(node)) {
          events_.push_back({true, i, {}});
          ++i;
          continue;
        }
        const std::size_t child = child_toward(node, l);
        std::size_t j = i;
        while (j < end && model_.is_ancestor_or_self(child, uses_[j].loop)) ++j;
        unroll(static_cast<std::ptrdiff_t>(child), i, j);
        i = j;
      }
    }
    events_.push_back({false, 0, {node, AnchorPosition::after}});
  }

  std::size_t child_toward(std::ptrdiff_t node, std::size_t loop) const {
    std::size_t cur = loop;
    while (true) {
      auto parent = model_.parent_of(cur);
      if (node == kTop ? !parent : (parent && *parent == static_cast<std::size_t>(node))) return cur;
      cur = *parent;
    }
  }

  std::ptrdiff_t depth(std::ptrdiff_t loop) const {
    return loop == kTop ? -1 : static_cast<std::ptrdiff_t>(model_.depth(static_cast<std::size_t>(loop)));
  }

  const std::vector<std::size_t>& events_at(Anchor a) const {
    static const std::vector<std::size_t> kEmpty;
    auto it = at_anchor_.find(a);
    return it == at_anchor_.end() ? kEmpty : it->second;
  }

  bool subtree_has(std::ptrdiff_t node, Side side, AccessKind kind) const {
    return std::any_of(uses_.begin(), uses_.end(), [&](const Use& u) {
      return u.side == side && u.kind == kind &&
             (node == kTop || model_.is_ancestor_or_self(static_cast<std::size_t>(node), u.loop));
    });
  }

  std::vector<std::size_t> chain_from_root(std::size_t loop) const {
    std::vector<std::size_t> chain;
    for (std::optional<std::size_t> cur = loop; cur; cur = model_.parent_of(*cur)) chain.push_back(*cur);
    std::reverse(chain.begin(), chain.end());
    return chain;
  }

  // Outermost loop enclosing `loop` after which a device-to-host copy always
  // sees current device data and precedes every host read outside it.
  std::ptrdiff_t hoist_back(std::size_t loop, std::size_t must_exclude) const {
    for (std::size_t a : chain_from_root(loop)) {
      if (must_exclude != kNone && model_.is_ancestor_or_self(a, must_exclude)) continue;
      const auto node = static_cast<std::ptrdiff_t>(a);
      if (subtree_has(node, Side::host, AccessKind::read)) continue;
      const auto& exits = events_at({node, AnchorPosition::after});
      const bool device_current = std::all_of(exits.begin(), exits.end(), [&](std::size_t k) {
        return last_write_[k] != kNone && uses_[last_write_[k]].side == Side::device;
      });
      if (device_current) return node;
    }
    return static_cast<std::ptrdiff_t>(loop);
  }

  // Outermost anchor before `loop` where a host-to-device copy always sees
  // current host data and no host write follows inside the anchor.
  std::optional<std::ptrdiff_t> hoist_forward(std::size_t loop, const ReplayState& st) const {
    if (!subtree_has(kTop, Side::host, AccessKind::write)) return kTop;
    for (std::size_t a : chain_from_root(loop)) {
      const auto node = static_cast<std::ptrdiff_t>(a);
      if (subtree_has(node, Side::host, AccessKind::write)) continue;
      const auto& entries = events_at({node, AnchorPosition::before});
      if (std::all_of(entries.begin(), entries.end(), [&](std::size_t k) { return st.host_fresh[k]; }))
        return node;
    }
    return std::nullopt;
  }

  ReplayState replay(const EntrySet& plan) const {
    ReplayState st;
    st.host_fresh.resize(events_.size());
    st.device_fresh.resize(events_.size());
    st.stale.resize(events_.size(), false);
    long latest = 0;
    long host = 0;
    long device = -1;
    for (std::size_t k = 0; k < events_.size(); ++k) {
      st.host_fresh[k] = host == latest;
      st.device_fresh[k] = device == latest;
      const auto& ev = events_[k];
      if (!ev.is_access) {
        if (plan.contains({ev.anchor, TransferDirection::device_to_host})) host = device;
        if (plan.contains({ev.anchor, TransferDirection::host_to_device})) device = host;
        continue;
      }
      const auto& u = uses_[ev.access];
      long& copy = u.side == Side::host ? host : device;
      if (u.kind == AccessKind::read) {
        st.stale[k] = copy != latest;
      } else {
        copy = ++latest;
      }
    }
    return st;
  }

  std::size_t first_stale_device_read(const ReplayState& st) const {
    for (std::size_t k = 0; k < events_.size(); ++k)
      if (st.stale[k] && uses_[events_[k].access].side == Side::device) return k;
    return kNone;
  }

  static bool any_stale(const ReplayState& st) {
    return std::find(st.stale.begin(), st.stale.end(), true) != st.stale.end();
  }

  const ProgramModel& model_;
  std::vector<Use> uses_;
  std::vector<Event> events_;
  std::vector<std::size_t> last_write_;  // last write before each event
  std::map<Anchor, std::vector<std::size_t>> at_anchor_;
};

}  // namespace

TransferPlan plan_transfers(const ProgramModel& model, const OffloadPattern& pattern) {
  const auto placed = device_placement(model, pattern);
  TransferPlan plan;
  if (!pattern.any()) return plan;

  using Key = std::tuple<std::ptrdiff_t, AnchorPosition, std::size_t, TransferDirection>;
  std::vector<Key> keys;
  for (std::size_t v = 0; v < model.variables().size(); ++v) {
    VariablePlanner planner(model, model.accesses_of(v), placed);
    if (!planner.touches_device()) continue;
    for (const auto& [anchor, direction] : planner.plan()) {
      const std::ptrdiff_t rank =
          anchor.loop == kTop
              ? (anchor.position == AnchorPosition::before ? -1
                                                           : static_cast<std::ptrdiff_t>(model.loop_count()))
              : static_cast<std::ptrdiff_t>(model.preorder_rank(static_cast<std::size_t>(anchor.loop)));
      keys.emplace_back(rank, anchor.position, v, direction);
    }
  }
  std::sort(keys.begin(), keys.end());
  for (const auto& [rank, position, v, direction] : keys) {
    TransferEntry e;
    e.variable = model.variables()[v].name;
    e.direction = direction;
    e.position = position;
    if (rank >= 0 && rank < static_cast<std::ptrdiff_t>(model.loop_count()))
      e.anchor_loop = model.loop(model.preorder()[static_cast<std::size_t>(rank)]).id;
    plan.entries.push_back(std::move(e));
  }
  return plan;
}

}  // namespace offload
