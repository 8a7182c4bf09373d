#include "smr/protocol.hpp"

namespace smr {

std::string to_string(TimerId id) {
    switch (id.kind) {
        case TimerKind::Delivery: return id.key == 0 ? "delivery" : "delivery:" + std::to_string(id.key);
        case TimerKind::Recovery: return "recovery";
        case TimerKind::Broadcast: return "broadcast";
        case TimerKind::View: return "view";
        case TimerKind::Toy: return "toy";
    }
    return "?";
}

const char* to_string(AdvanceCause c) {
    switch (c) {
        case AdvanceCause::Start: return "start";
        case AdvanceCause::Timer: return "timer";
        case AdvanceCause::Batch: return "batch";
        case AdvanceCause::BatchAtInit: return "batch-at-init";
    }
    return "?";
}

}  // namespace smr
