#include <gtest/gtest.h>

#include <random>

#include "smr/sync/synchronizer.hpp"

using namespace smr;

namespace {

// Largest v such that at least `need` entries are >= v.
View enumerate_oracle(const std::vector<View>& mv, std::size_t need) {
    View best = 0;
    for (View cand : mv) {
        std::size_t c = 0;
        for (View x : mv) c += x >= cand;
        if (c >= need) best = std::max(best, cand);
    }
    return best;
}

}  // namespace

TEST(ComputeViews, Examples) {
    EXPECT_EQ(compute_views({0, 0, 0, 0}, 1), std::make_pair(View{0}, View{0}));
    EXPECT_EQ(compute_views({3, 2, 2, 0}, 1), std::make_pair(View{2}, View{2}));
    EXPECT_EQ(compute_views({5, 4, 1, 0}, 1), std::make_pair(View{1}, View{4}));
}

TEST(ComputeViews, MatchesEnumerationOracle) {
    std::mt19937_64 rng(42);
    for (int iter = 0; iter < 2000; ++iter) {
        const std::uint32_t f = 1 + rng() % 3;
        const std::uint32_t n = 3 * f + 1;
        std::vector<View> mv(n);
        for (auto& x : mv) x = rng() % 8;
        auto [view, plus] = compute_views(mv, f);
        EXPECT_EQ(view, enumerate_oracle(mv, 2 * f + 1));
        EXPECT_EQ(plus, enumerate_oracle(mv, f + 1));
        EXPECT_LE(view, plus);
    }
}

TEST(Synchronizer, AdvanceWishes) {
    Synchronizer s(4, 1);
    EXPECT_EQ(s.advance().wishes, std::vector<View>{1});

    // view = view_plus = 2
    Synchronizer t(4, 1);
    for (Pid p : {1, 2, 3}) t.handle_wish(p, 2);
    ASSERT_EQ(t.state().view, 2u);
    ASSERT_EQ(t.state().view_plus, 2u);
    EXPECT_EQ(t.advance().wishes, std::vector<View>{3});

    // view = 1, view_plus = 4
    Synchronizer u(4, 1);
    u.handle_wish(1, 4);
    u.handle_wish(2, 4);
    u.handle_wish(3, 1);
    ASSERT_EQ(u.state().view, 1u);
    ASSERT_EQ(u.state().view_plus, 4u);
    EXPECT_EQ(u.advance().wishes, std::vector<View>{4});
}

TEST(Synchronizer, HandleWishSequence) {
    Synchronizer s(4, 1);
    s.advance();
    auto own = s.handle_wish(1, 1);  // own WISH(1) loops back
    EXPECT_TRUE(own.wishes.empty());
    EXPECT_FALSE(own.entered);

    auto out = s.handle_wish(2, 1);  // max_views [1,1,0,0]
    EXPECT_EQ(s.state().view_plus, 1u);
    EXPECT_EQ(s.state().view, 0u);
    EXPECT_EQ(out.wishes, std::vector<View>{1});
    EXPECT_FALSE(out.entered);

    out = s.handle_wish(3, 1);  // [1,1,1,0]
    ASSERT_TRUE(out.entered);
    EXPECT_EQ(*out.entered, 1u);
    EXPECT_FALSE(s.state().advanced);
    EXPECT_TRUE(out.wishes.empty());

    const auto before = s.state().max_views;
    out = s.handle_wish(2, 1);
    EXPECT_TRUE(out.wishes.empty());
    EXPECT_FALSE(out.entered);
    EXPECT_EQ(s.state().max_views, before);
}

TEST(Synchronizer, Periodic) {
    Synchronizer idle(4, 1);
    EXPECT_TRUE(idle.periodic().wishes.empty());

    Synchronizer a(4, 1);
    for (Pid p : {1, 2, 3}) a.handle_wish(p, 2);
    a.advance();
    EXPECT_EQ(a.periodic().wishes, std::vector<View>{3});

    Synchronizer b(4, 1);
    b.handle_wish(1, 3);
    b.handle_wish(2, 3);
    ASSERT_FALSE(b.state().advanced);
    ASSERT_EQ(b.state().view_plus, 3u);
    EXPECT_EQ(b.periodic().wishes, std::vector<View>{3});
}

TEST(Synchronizer, IgnoresMalformedWishes) {
    Synchronizer s(4, 1);
    EXPECT_TRUE(s.handle_wish(0, 5).wishes.empty());
    EXPECT_TRUE(s.handle_wish(5, 5).wishes.empty());
    EXPECT_TRUE(s.handle_wish(1, 0).wishes.empty());
    EXPECT_EQ(s.state().max_views, (std::vector<View>{0, 0, 0, 0}));
}

TEST(Synchronizer, SingleByzantineCannotMoveViews) {
    Synchronizer s(4, 1);
    for (View v = 1; v < 1000; v *= 3) {
        auto out = s.handle_wish(4, v);
        EXPECT_FALSE(out.entered);
        EXPECT_TRUE(out.wishes.empty());
    }
    EXPECT_EQ(s.state().view_plus, 0u);
    EXPECT_EQ(s.stored_entries(), 4u);
}
