#include <gtest/gtest.h>

#include "support.hpp"

using namespace smr;
using namespace smr::testing;

namespace {

using C = Cluster<PbftLight>;

Message signed_by(const C& c, Pid p, MsgType t, Body b) { return Signer(c.keys, p).sign(t, std::move(b)); }

void start_view1(C& c) {
    c.enter_view(1);
    c.run();
    for (Pid i = 1; i <= c.n(); ++i)
        if (!c.silent.contains(i)) ASSERT_EQ(c.node(i).status(), ReplicaCore::Status::Normal) << "p" << i;
}

Certificate committed(const C& c, View v, Pos k, const Value& x) {
    Certificate cert{MsgType::Commit, v, k, hash_of(x), {}};
    for (Pid p : {1, 2, 3}) cert.votes.push_back(Signer(c.keys, p).sign_vote({MsgType::Commit, v, k, hash_of(x)}));
    return cert;
}

}  // namespace

TEST(PbftLight, BroadcastStartsTimerAndForwards) {
    C c(params());
    start_view1(c);
    const Value x = val(3, 1);
    c.node(2).on_message(3, signed_by(c, 3, MsgType::Broadcast, ValueBody{x}));
    EXPECT_TRUE(c.env(2).timers.contains(TimerId{TimerKind::Delivery, x.id}));
    EXPECT_EQ(c.env(2).timers.at(TimerId{TimerKind::Delivery, x.id}), 16);
    auto fw = c.env(2).of_type(MsgType::Forward);
    ASSERT_EQ(fw.size(), 1u);
    EXPECT_EQ(fw[0].to, 1u);
}

TEST(PbftLight, LeaderProposesForwardedValueOnce) {
    C c(params());
    start_view1(c);
    const Value x = val(2, 1);
    c.node(1).on_message(2, signed_by(c, 2, MsgType::Forward, ValueBody{x}));
    c.node(1).on_message(3, signed_by(c, 3, MsgType::Forward, ValueBody{x}));
    auto pp = c.env(1).of_type(MsgType::PrePrepare);
    ASSERT_EQ(pp.size(), 1u);
    const auto& b = std::get<ProposalBody>(pp[0].m->body);
    EXPECT_EQ(b.v, 1u);
    EXPECT_EQ(b.k, 1u);
    EXPECT_EQ(b.x, x);
}

TEST(PbftLight, IgnoresProposalFromNonLeader) {
    C c(params());
    start_view1(c);
    c.env(3).clear();
    c.node(3).on_message(2, signed_by(c, 2, MsgType::PrePrepare, ProposalBody{1, 1, val(2, 1)}));
    EXPECT_TRUE(c.env(3).of_type(MsgType::Prepare).empty());
    EXPECT_EQ(c.node(3).slot(1), nullptr);
}

TEST(PbftLight, PrepareQuorumSendsCommit) {
    C c(params());
    start_view1(c);
    const Value x = val(2, 1);
    c.node(4).on_message(1, signed_by(c, 1, MsgType::PrePrepare, ProposalBody{1, 1, x}));
    c.env(4).clear();
    for (Pid p : {1, 2, 3})
        c.node(4).on_message(p, signed_by(c, p, MsgType::Prepare, VoteBody{MsgType::Prepare, 1, 1, hash_of(x)}));
    const auto* s = c.node(4).slot(1);
    ASSERT_NE(s, nullptr);
    EXPECT_EQ(s->phase, ReplicaCore::Phase::Prepared);
    EXPECT_EQ(s->prep_view, 1u);
    ASSERT_TRUE(s->cert);
    auto commits = c.env(4).of_type(MsgType::Commit);
    ASSERT_EQ(commits.size(), 1u);
    EXPECT_EQ(std::get<VoteBody>(commits[0].m->body), (VoteBody{MsgType::Commit, 1, 1, hash_of(x)}));
}

TEST(PbftLight, EndToEndDelivery) {
    C c(params());
    start_view1(c);
    const Value x = val(2, 1), y = val(3, 1);
    c.node(2).broadcast(x);
    c.node(3).broadcast(y);
    c.run();
    for (Pid p = 1; p <= 4; ++p) {
        ASSERT_EQ(c.env(p).delivered.size(), 2u) << "p" << p;
        EXPECT_EQ(c.env(p).delivered[0].second, c.env(1).delivered[0].second);
        EXPECT_EQ(c.env(p).delivered[1].second, c.env(1).delivered[1].second);
        EXPECT_FALSE(c.env(p).timers.contains(TimerId{TimerKind::Delivery, x.id}));
        EXPECT_FALSE(c.env(p).timers.contains(TimerId{TimerKind::Recovery, 0}));
    }
    EXPECT_GE(c.count(MsgType::Decision), 4u);
}

TEST(PbftLight, DeliversInOrderAcrossGaps) {
    C c(params());
    start_view1(c);
    const Value x = val(1, 1), y = val(1, 2), z = val(1, 3);
    auto decision = [&](Pos k, const Value& v) {
        return signed_by(c, 1, MsgType::Decision, DecisionBody{{DecisionEntry{v, k, committed(c, 1, k, v)}}});
    };
    c.node(4).on_message(1, decision(1, x));
    c.node(4).on_message(1, decision(3, z));
    ASSERT_EQ(c.env(4).delivered.size(), 1u);
    EXPECT_EQ(c.env(4).delivered[0], std::make_pair(Pos{1}, x));
    c.node(4).on_message(1, decision(2, y));
    ASSERT_EQ(c.env(4).delivered.size(), 3u);
    EXPECT_EQ(c.env(4).delivered[2], std::make_pair(Pos{3}, z));
}

TEST(PbftLight, DecisionNeedsValidCommitCertificate) {
    C c(params());
    start_view1(c);
    const Value x = val(1, 1);
    auto cert = committed(c, 1, 1, x);
    cert.votes.pop_back();
    c.node(4).on_message(1, signed_by(c, 1, MsgType::Decision, DecisionBody{{DecisionEntry{x, 1, cert}}}));
    EXPECT_TRUE(c.env(4).delivered.empty());
}

TEST(PbftLight, TimeoutGrowsDurations) {
    C c(params());
    start_view1(c);
    c.node(2).on_timer(TimerId{TimerKind::Recovery, 0});
    EXPECT_EQ(c.env(2).advances.back(), AdvanceCause::Timer);
    EXPECT_EQ(c.node(2).status(), ReplicaCore::Status::Advanced);
    EXPECT_EQ(c.node(2).dur_delivery(), 16 + 4);
    EXPECT_EQ(c.node(2).dur_recovery(), 24 + 4);
    EXPECT_TRUE(c.env(2).timers.empty());
}

TEST(PbftLight, LatencyModeCapsDurations) {
    auto p = params();
    p.latency_mode = true;
    p.init_dur_recovery = 6 * p.delta_cap;
    p.init_dur_delivery = 4 * p.delta_cap;
    C c(p);
    start_view1(c);
    for (int i = 0; i < 3; ++i) c.node(2).on_timer(TimerId{TimerKind::Recovery, 0});
    EXPECT_EQ(c.node(2).dur_recovery(), 24);
    EXPECT_EQ(c.node(2).dur_delivery(), 16);
}

TEST(PbftLight, NewViewSendsNewLeaderAndArmsRecovery) {
    C c(params());
    start_view1(c);
    c.env(2).clear();
    c.node(2).on_new_view(3);
    auto nl = c.env(2).of_type(MsgType::NewLeader);
    ASSERT_EQ(nl.size(), 1u);
    EXPECT_EQ(nl[0].to, 3u);
    EXPECT_TRUE(c.env(2).timer_active(TimerId{TimerKind::Recovery, 0}));
    EXPECT_EQ(c.node(2).status(), ReplicaCore::Status::Initializing);
}

TEST(PbftLight, RejectsAlteredOrMisattributedNewState) {
    C c(params());
    start_view1(c);
    c.node(1).broadcast(val(1, 1));
    c.run();
    c.enter_view(2);
    // Capture p2's honest NEW_STATE before anyone processes it.
    c.drop = [](Pid, Pid, const Message& m) { return m.type == MsgType::NewState; };
    c.run();
    MessagePtr honest;
    for (const auto& [from, to, m] : c.history)
        if (m->type == MsgType::NewState && from == 2) honest = m;
    ASSERT_TRUE(honest);
    auto body = std::get<NewStateBody>(honest->body);
    ASSERT_FALSE(body.log.empty());

    auto altered = body;
    altered.log[0].second = val(4, 4);
    c.node(3).on_message(2, signed_by(c, 2, MsgType::NewState, altered));
    EXPECT_EQ(c.node(3).status(), ReplicaCore::Status::Initializing);

    c.node(3).on_message(4, signed_by(c, 4, MsgType::NewState, body));
    EXPECT_EQ(c.node(3).status(), ReplicaCore::Status::Initializing);

    c.node(3).on_message(2, *honest);
    EXPECT_EQ(c.node(3).status(), ReplicaCore::Status::Normal);
}

TEST(PbftLight, PreparedValueSurvivesViewChange) {
    C c(params());
    start_view1(c);
    const Value x = val(3, 1);
    c.drop = [](Pid, Pid, const Message& m) { return m.type == MsgType::Commit; };
    c.node(3).broadcast(x);
    c.run();
    for (Pid p = 1; p <= 4; ++p) {
        ASSERT_TRUE(c.env(p).delivered.empty());
        ASSERT_EQ(c.node(p).slot(1)->phase, ReplicaCore::Phase::Prepared);
    }
    c.drop = nullptr;
    c.silent.insert(1);
    c.enter_view(2);
    c.run();
    for (Pid p = 2; p <= 4; ++p) {
        ASSERT_EQ(c.env(p).delivered.size(), 1u) << "p" << p;
        EXPECT_EQ(c.env(p).delivered[0], std::make_pair(Pos{1}, x));
    }
}

TEST(PbftLight, FutureMessagesReplayOnEntry) {
    C c(params());
    start_view1(c);
    // p4 lags behind; everyone else moves to view 2 and finishes the view change.
    c.silent.insert(4);
    for (Pid p = 1; p <= 3; ++p) c.node(p).on_new_view(2);
    c.run();
    std::vector<MessagePtr> missed;
    for (const auto& [from, to, m] : c.history)
        if (m->view() == 2 && (to == 0 || to == 4)) missed.push_back(m);
    c.silent.clear();
    for (const auto& m : missed) c.node(4).on_message(m->signer, *m);
    EXPECT_GT(c.node(4).future().slots(), 0u);
    c.node(4).on_new_view(2);
    EXPECT_EQ(c.node(4).status(), ReplicaCore::Status::Normal);
    EXPECT_EQ(c.node(4).future().slots(), 0u);
}
