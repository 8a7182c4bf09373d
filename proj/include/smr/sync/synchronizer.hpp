#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "smr/types.hpp"

namespace smr {

struct SyncState {
    std::vector<View> max_views;
    View view = 0;
    View view_plus = 0;
    bool advanced = false;
    View last_entered = 0;
};

// Result of one transition: WISH views to send to all (self included) and
// the view entered, if any.
struct SyncOutput {
    std::vector<View> wishes;
    std::optional<View> entered;
};

// (2f+1)-st and (f+1)-st highest entries of max_views.
std::pair<View, View> compute_views(const std::vector<View>& max_views, std::uint32_t f);

class Synchronizer {
public:
    Synchronizer(std::uint32_t n, std::uint32_t f);

    SyncOutput advance();
    SyncOutput handle_wish(Pid sender, View v);
    SyncOutput periodic();

    const SyncState& state() const { return s_; }
    std::size_t stored_entries() const { return s_.max_views.size(); }

private:
    std::uint32_t f_;
    SyncState s_;
};

}  // namespace smr
