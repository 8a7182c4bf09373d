#pragma once

#include "smr/types.hpp"

namespace smr {

// Drifts at a constant rational rate before GST and at rate 1 afterwards.
class LocalClock {
public:
    LocalClock() = default;
    LocalClock(Rational rate, Tick gst) : rate_(rate), gst_(gst) {}

    Tick local(Tick real) const {
        if (real <= gst_) return floor_div(real * rate_.num, rate_.den);
        return local(gst_) + (real - gst_);
    }

    // Smallest real time whose local reading is at least `target`.
    Tick real_when(Tick target) const {
        if (target <= 0) return 0;
        Tick at_gst = local(gst_);
        if (target <= at_gst) return ceil_div(target * rate_.den, rate_.num);
        return gst_ + (target - at_gst);
    }

    Rational rate() const { return rate_; }

private:
    Rational rate_{};
    Tick gst_ = 0;
};

}  // namespace smr
