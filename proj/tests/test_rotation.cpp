#include <gtest/gtest.h>

#include "support.hpp"

using namespace smr;
using namespace smr::testing;

namespace {

using R = Cluster<PbftRotation>;
constexpr TimerId kDelivery{TimerKind::Delivery, 0};
constexpr TimerId kBroadcast{TimerKind::Broadcast, 0};

Message signed_by(const R& c, Pid p, MsgType t, Body b) { return Signer(c.keys, p).sign(t, std::move(b)); }

void enter(R& c, View v) {
    c.enter_view(v);
    c.run();
}

std::vector<ProposalBody> proposals(const FakeEnv& e) {
    std::vector<ProposalBody> out;
    for (const auto& s : e.of_type(MsgType::PrePrepare)) out.push_back(std::get<ProposalBody>(s.m->body));
    return out;
}

}  // namespace

TEST(PbftRotation, LeaderProposesFromQueue) {
    R c(params(2));
    enter(c, 1);
    ASSERT_EQ(c.node(1).status(), ReplicaCore::Status::Normal);
    c.env(1).clear();
    const Value x = val(2, 1);
    c.node(1).on_message(2, signed_by(c, 2, MsgType::Broadcast, ValueBody{x}));
    auto pp = proposals(c.env(1));
    ASSERT_EQ(pp.size(), 1u);
    EXPECT_EQ(pp[0].v, 1u);
    EXPECT_EQ(pp[0].k, 1u);
    EXPECT_EQ(pp[0].x, x);
    EXPECT_EQ(c.node(1).next(), 2u);
    ASSERT_FALSE(c.env(1).started.empty());
    EXPECT_EQ(c.env(1).started.back(), std::make_pair(kBroadcast, Tick{8}));
}

TEST(PbftRotation, NoProposalPastBatch) {
    R c(params(2));
    enter(c, 1);
    for (std::uint64_t s = 1; s <= 3; ++s)
        c.node(1).on_message(2, signed_by(c, 2, MsgType::Broadcast, ValueBody{val(2, s)}));
    auto pp = proposals(c.env(1));
    ASSERT_EQ(pp.size(), 2u);
    EXPECT_EQ(c.node(1).next(), 3u);
    EXPECT_FALSE(c.env(1).timer_active(kBroadcast));
}

TEST(PbftRotation, BroadcastTimerProposesNop) {
    R c(params(2));
    enter(c, 1);
    c.env(1).clear();
    c.node(1).on_timer(kBroadcast);
    auto pp = proposals(c.env(1));
    ASSERT_EQ(pp.size(), 1u);
    EXPECT_TRUE(pp[0].x.is_nop());
    EXPECT_EQ(pp[0].k, 1u);
}

TEST(PbftRotation, BatchCompletionAdvances) {
    R c(params(2));
    enter(c, 1);
    c.node(1).on_message(2, signed_by(c, 2, MsgType::Broadcast, ValueBody{val(2, 1)}));
    c.run();
    for (Pid p = 1; p <= 4; ++p) {
        ASSERT_EQ(c.node(p).last_delivered(), 1u);
        EXPECT_TRUE(c.env(p).advances.empty());
        EXPECT_EQ(c.env(p).started.back(), std::make_pair(kDelivery, Tick{16}));
    }
    c.node(1).on_timer(kBroadcast);
    c.run();
    for (Pid p = 1; p <= 4; ++p) {
        EXPECT_EQ(c.node(p).last_delivered(), 2u);
        ASSERT_EQ(c.env(p).advances.size(), 1u) << "p" << p;
        EXPECT_EQ(c.env(p).advances[0], AdvanceCause::Batch);
        EXPECT_EQ(c.node(p).status(), ReplicaCore::Status::Advanced);
        EXPECT_TRUE(c.env(p).timers.empty());
    }
}

TEST(PbftRotation, RejectsProposalBeyondViewRange) {
    R c(params(2));
    enter(c, 1);
    c.env(3).clear();
    c.node(3).on_message(1, signed_by(c, 1, MsgType::PrePrepare, ProposalBody{1, 3, val(1, 1)}));
    EXPECT_TRUE(c.env(3).of_type(MsgType::Prepare).empty());
}

TEST(PbftRotation, LeaderNextFromView) {
    R c(params(2));
    enter(c, 1);
    enter(c, 3);
    EXPECT_EQ(c.node(3).next(), 5u);
    for (Pid p = 1; p <= 4; ++p) {
        EXPECT_EQ(c.node(p).status(), ReplicaCore::Status::Normal);
        EXPECT_TRUE(c.env(p).timer_active(kDelivery));
    }
    c.run();
    // positions 1..4 were filled with nop and are delivered without advancing
    for (Pid p = 1; p <= 4; ++p) EXPECT_EQ(c.node(p).last_delivered(), 4u);
}

TEST(PbftRotation, LaggingFollowerAdvancesAtInit) {
    R c(params(2));
    enter(c, 1);
    c.node(1).on_timer(kBroadcast);
    c.node(1).on_timer(kBroadcast);
    c.run();
    ASSERT_EQ(c.node(4).last_delivered(), 2u);

    c.silent.insert(4);
    for (Pid p = 1; p <= 3; ++p) c.node(p).on_new_view(2);
    c.run();
    c.node(2).on_timer(kBroadcast);
    c.node(2).on_timer(kBroadcast);
    c.run();
    ASSERT_EQ(c.node(1).last_delivered(), 4u);

    // p4 learns the decisions of view 2 before entering it.
    c.silent.clear();
    MessagePtr new_state;
    for (const auto& [from, to, m] : c.history) {
        if (m->type == MsgType::Decision) c.node(4).on_message(from, *m);
        if (m->type == MsgType::NewState && m->view() == 2) new_state = m;
    }
    ASSERT_EQ(c.node(4).last_delivered(), 4u);
    ASSERT_TRUE(new_state);
    c.env(4).clear();
    c.node(4).on_new_view(2);
    c.node(4).on_message(2, *new_state);
    ASSERT_EQ(c.env(4).advances.size(), 1u);
    EXPECT_EQ(c.env(4).advances[0], AdvanceCause::BatchAtInit);
    EXPECT_EQ(c.node(4).status(), ReplicaCore::Status::Advanced);
}

TEST(PbftRotation, CrashedLeaderTimesOut) {
    R c(params(2));
    c.silent.insert(2);
    enter(c, 1);
    c.node(1).on_timer(kBroadcast);
    c.node(1).on_timer(kBroadcast);
    c.run();
    enter(c, 2);
    for (Pid p : {1, 3, 4}) {
        EXPECT_EQ(c.node(p).status(), ReplicaCore::Status::Initializing);
        EXPECT_TRUE(c.env(p).timer_active(TimerId{TimerKind::Recovery, 0}));
        c.node(p).on_timer(TimerId{TimerKind::Recovery, 0});
        EXPECT_EQ(c.env(p).advances.back(), AdvanceCause::Timer);
    }
}

TEST(PbftRotation, QueueIsFifoAndDropsDelivered) {
    R c(params(4));
    enter(c, 1);
    c.silent.insert(1);
    for (std::uint64_t s = 1; s <= 3; ++s) c.node(2).on_message(3, signed_by(c, 3, MsgType::Broadcast, ValueBody{val(3, s)}));
    ASSERT_EQ(c.node(2).queue().size(), 3u);
    EXPECT_EQ(c.node(2).queue().front(), val(3, 1));
    c.node(2).on_message(3, signed_by(c, 3, MsgType::Broadcast, ValueBody{val(3, 2)}));
    EXPECT_EQ(c.node(2).queue().size(), 3u);
}
