#include "smr/sync/synchronizer.hpp"

#include <algorithm>
#include <functional>

namespace smr {

std::pair<View, View> compute_views(const std::vector<View>& max_views, std::uint32_t f) {
    std::vector<View> sorted = max_views;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    return {sorted.at(2 * f), sorted.at(f)};
}

Synchronizer::Synchronizer(std::uint32_t n, std::uint32_t f) : f_(f) { s_.max_views.assign(n, 0); }

SyncOutput Synchronizer::advance() {
    s_.advanced = true;
    return {{std::max(s_.view + 1, s_.view_plus)}, std::nullopt};
}

SyncOutput Synchronizer::handle_wish(Pid sender, View v) {
    SyncOutput out;
    if (sender < 1 || sender > s_.max_views.size() || v < 1) return out;
    const View prev_view = s_.view;
    const View prev_plus = s_.view_plus;
    auto& slot = s_.max_views[sender - 1];
    slot = std::max(slot, v);
    std::tie(s_.view, s_.view_plus) = compute_views(s_.max_views, f_);
    if (s_.view_plus == s_.view && s_.view > prev_view) {
        out.entered = s_.view;
        s_.last_entered = s_.view;
        s_.advanced = false;
    }
    if (s_.view_plus > prev_plus) out.wishes.push_back(s_.view_plus);
    return out;
}

SyncOutput Synchronizer::periodic() {
    if (s_.advanced) return {{std::max(s_.view + 1, s_.view_plus)}, std::nullopt};
    if (s_.view_plus > 0) return {{s_.view_plus}, std::nullopt};
    return {};
}

}  // namespace smr
