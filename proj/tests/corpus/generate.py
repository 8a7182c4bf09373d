#!/usr/bin/env python3
"""Writes the hand-built checker corpus: one passing and one violating trace per property.

Run from anywhere; output lands next to this file together with manifest.json.
"""
import json
from pathlib import Path

OUT = Path(__file__).resolve().parent

BASE = {
    "format": 1, "protocol": "pbft-light", "n": 4, "f": 1, "faulty": [4],
    "gst": 100, "delta": 2, "delta_cap": 4, "rho": 10, "tau": 4,
    "t_broadcast": 8, "batch": 4, "init_dur_delivery": 16, "init_dur_recovery": 24,
    "horizon": 1000, "seed": 0,
}


class T:
    def __init__(self, prop, **cfg):
        self.cfg = dict(BASE, name=prop, checks=[prop], **cfg)
        self.ev = []

    def e(self, t, pid, kind, **data):
        self.ev.append({"t": t, "pid": pid, "kind": kind, "data": data})
        return self

    def start(self, t, p): return self.e(t, p, "Start")
    def enter(self, t, p, v): return self.e(t, p, "EnterView", v=v)
    def adv(self, t, p, v, cause="timer"): return self.e(t, p, "AdvanceCall", v=v, cause=cause)
    def wish(self, t, p, v, view, plus): return self.e(t, p, "WishSent", v=v, view=view, view_plus=plus)
    def cview(self, t, p, v): return self.e(t, p, "EnterConsensusView", v=v)
    def bcast(self, t, p, x): return self.e(t, p, "BroadcastCall", value=x, valid=1)
    def mem(self, t, p, a, b, c=0): return self.e(t, p, "MemSample", sync_entries=a, buffer_slots=b, buffer_messages=c)
    def lock(self, t, p, v, k, h): return self.e(t, p, "LockSet", view=v, position=k, hash=h)

    def vote(self, t, p, typ, v, k, h):
        return self.e(t, p, "VoteSent", type=typ, view=v, position=k, hash=h, signer=p, dest=0)

    def recv(self, t, p, typ, frm, sent, h=0):
        return self.e(t, p, "Receive", type=typ, view=0, position=0, hash=h, **{"from": frm}, sent_at=sent)

    def deliver(self, t, p, k, x, valid=1):
        return self.e(t, p, "Deliver", position=k, value=x, valid=valid, nop=0)

    def step(self, t, v, who=(1, 2, 3), cause="timer"):
        for p in who:
            self.adv(t - 1, p, v - 1, cause)
        for p in who:
            self.enter(t, p, v)
        return self

    def sort(self):
        self.ev.sort(key=lambda e: e["t"])
        return self

    def write(self, path):
        with open(path, "w") as f:
            f.write(json.dumps({"format": 1, "kind": "Header", "config": self.cfg}) + "\n")
            for e in self.ev:
                f.write(json.dumps(e) + "\n")


CASES = {}


def case(prop, stem=None):
    def reg(fn):
        CASES[prop] = (stem or prop.split(".", 1)[1].replace("_", "-"), fn)
        return fn
    return reg


@case("harness.event_order", "event-order")
def _(ok):
    t = T("harness.event_order").step(10, 1)
    if not ok:
        t.enter(5, 1, 2)
    return t


@case("harness.post_gst_delivery")
def _(ok):
    return T("harness.post_gst_delivery").recv(107 if ok else 110, 2, "PREPARE", 1, 105)


@case("sync.monotonicity")
def _(ok):
    t = T("sync.monotonicity").step(10, 1).step(20, 2)
    if not ok:
        t.enter(30, 1, 1)
    return t


@case("sync.validity")
def _(ok):
    t = T("sync.validity")
    return t.step(10, 1) if ok else t.enter(10, 1, 1)


@case("sync.no_skip", "no-skip")
def _(ok):
    t = T("sync.no_skip").step(10, 1)
    return t.step(20, 2) if ok else t.step(20, 3)


@case("sync.wish_monotonicity")
def _(ok):
    t = T("sync.wish_monotonicity").wish(1, 1, 3, 0, 3)
    return t.wish(2, 1, 4, 0, 3) if ok else t.wish(2, 1, 2, 0, 2)


@case("sync.wish_form")
def _(ok):
    return T("sync.wish_form").wish(1, 1, 3 if ok else 5, 0, 2)


@case("sync.bounded_entry")
def _(ok):
    t = T("sync.bounded_entry")
    for p in (1, 2, 3):
        t.adv(105, p, 0)
    t.enter(110, 1, 1).enter(110, 2, 1).enter(112 if ok else 120, 3, 1)
    return t


@case("sync.startup")
def _(ok):
    t = T("sync.startup")
    for p in (1, 2, 3):
        t.adv(105, p, 0)
    if ok:
        for p in (1, 2, 3):
            t.enter(110, p, 1)
    return t


@case("sync.progress")
def _(ok):
    t = T("sync.progress").step(110, 1)
    for p in (1, 2, 3):
        t.adv(120, p, 1)
    if ok:
        for p in (1, 2, 3):
            t.enter(125, p, 2)
    return t


@case("sync.latency_a", "latency-a")
def _(ok):
    t = T("sync.latency_a")
    for p in (1, 2, 3):
        t.adv(50, p, 0)
    t.enter(60, 1, 1).enter(60, 2, 1).enter(114 if ok else 200, 3, 1)
    return t


@case("sync.latency_b", "latency-b")
def _(ok):
    t = T("sync.latency_b").step(110, 1)
    for p in (1, 2, 3):
        t.adv(129, p, 1)
    t.enter(130, 1, 2).enter(130, 2, 2).enter(131 if ok else 160, 3, 2)
    return t


@case("sync.bounded_space")
def _(ok):
    return T("sync.bounded_space").mem(1, 2, 4, 2).mem(2, 2, 4 if ok else 5, 40 if ok else 41)


def csync(prop):
    return T(prop, protocol="consensus-sync", view_duration_unit=4)


def csync_views(t, rows):
    for tick, pid, v in rows:
        if v == 1:
            t.adv(tick - 1, pid, 0, "start")
        t.cview(tick, pid, v)
    return t.sort()


@case("csync.I", "csync-1")
def _(ok):
    rows = [(110, p, 1) for p in (1, 2, 3)] + [(120, p, 2) for p in (1, 2, 3)]
    if not ok:
        rows.append((130, 1, 1))
    return csync_views(csync("csync.I"), rows)


@case("csync.III", "csync-3")
def _(ok):
    rows = [(110, p, 1) for p in (1, 2, 3)] + [(120, p, 2 if ok else 3) for p in (1, 2, 3)]
    return csync_views(csync("csync.III"), rows)


@case("csync.IV", "csync-4")
def _(ok):
    rows = [(110, 1, 1), (110, 2, 1), (114 if ok else 120, 3, 1)]
    return csync_views(csync("csync.IV"), rows)


@case("csync.V", "csync-5")
def _(ok):
    second = 115 if ok else 114  # F(1) = 4
    rows = [(110, p, 1) for p in (1, 2, 3)] + [(second, p, 2) for p in (1, 2, 3)]
    return csync_views(csync("csync.V"), rows)


def votes(t, tick, typ, v, k, h, who):
    for p in who:
        t.vote(tick, p, typ, v, k, h)
    return t


@case("cert.prepared_agreement")
def _(ok):
    t = votes(T("cert.prepared_agreement"), 5, "PREPARE", 1, 1, 11, (1, 2))
    return votes(t, 6, "PREPARE", 1, 1, 22, (3,) if ok else (2, 3))


@case("cert.no_duplicate")
def _(ok):
    t = votes(T("cert.no_duplicate"), 5, "PREPARE", 1, 1, 11, (1, 2))
    return votes(t, 6, "PREPARE", 1, 2, 22 if ok else 11, (1, 3))


@case("cert.commit_implies_prepare")
def _(ok):
    t = T("cert.commit_implies_prepare")
    if ok:
        votes(t, 4, "PREPARE", 1, 1, 11, (1, 2, 3))
    return votes(t, 5, "COMMIT", 1, 1, 11, (1, 2))


@case("cert.commit_locks_later")
def _(ok):
    t = votes(T("cert.commit_locks_later"), 5, "PREPARE", 1, 1, 11, (1, 2, 3))
    votes(t, 6, "COMMIT", 1, 1, 11, (1, 2, 3))
    return votes(t, 9, "PREPARE", 2, 1, 11 if ok else 22, (2, 3))


@case("cert.committed_agreement")
def _(ok):
    t = T("cert.committed_agreement", protocol="hotstuff-light")
    votes(t, 5, "PREPARE", 1, 1, 11, (1, 2, 3))
    votes(t, 6, "COMMIT", 1, 1, 11, (1, 2, 3))
    votes(t, 9, "PREPARE", 2, 1, 22, (2, 3))
    return votes(t, 10, "COMMIT", 2, 1, 22, (2, 3) if not ok else (2,))


@case("cert.unforgeability")
def _(ok):
    t = votes(T("cert.unforgeability"), 5, "PREPARE", 1, 1, 11, (1, 2) if ok else (1,))
    return t.e(6, 3, "CertAccepted", cert="PREPARE", view=1, position=1, hash=11, signers=[1, 2, 4])


@case("hotstuff.lock_monotonic")
def _(ok):
    t = T("hotstuff.lock_monotonic", protocol="hotstuff-light").lock(5, 1, 3, 1, 1)
    return t.lock(6, 1, 4 if ok else 2, 1, 1)


@case("abcast.integrity")
def _(ok):
    return T("abcast.integrity").deliver(10, 1, 1, 11).deliver(11, 1, 2, 12 if ok else 11)


@case("abcast.external_validity")
def _(ok):
    return T("abcast.external_validity").deliver(10, 1, 1, 11, 1 if ok else 0)


@case("abcast.ordering")
def _(ok):
    return T("abcast.ordering").deliver(10, 1, 1, 11).deliver(11, 2, 1, 11 if ok else 22)


@case("abcast.liveness")
def _(ok):
    t = T("abcast.liveness", liveness_cutoff=500).bcast(10, 2, 11)
    for p in (1, 2, 3) if ok else (1, 2):
        t.deliver(40, p, 1, 11)
    return t


def good_case(prop):
    t = T(prop, latency_mode=True)
    for p in (1, 2, 3):
        t.start(104, p)
    return t


@case("latency.good_case")
def _(ok):
    t = good_case("latency.good_case")
    for p in (1, 2, 3):
        t.adv(105, p, 0, "start")
    for p in (1, 2, 3):
        t.enter(106, p, 1)
    t.bcast(110, 2, 11)
    for p in (1, 2, 3):
        t.deliver(118 if ok or p != 3 else 119, p, 1, 11)
    return t


@case("latency.recovery")
def _(ok):
    # bound = GST + rho + max(rho+delta, 6 Delta) + 4 Delta + max(rho, delta) + 7 delta = 174
    t = T("latency.recovery", latency_mode=True)
    for p in (1, 2, 3):
        t.start(5, p)
    t.step(20, 1, cause="start").bcast(50, 2, 11)
    for p in (1, 2, 3):
        t.deliver(174 if ok or p != 3 else 175, p, 1, 11)
    return t


@case("latency.rotation_recovery")
def _(ok):
    # bound = GST + rho + 4 Delta + B max(4 Delta, T + 3 Delta) + 3 delta = 212
    t = T("latency.rotation_recovery", protocol="pbft-rotation", latency_mode=True,
          init_dur_delivery=20, init_dur_recovery=16)
    for p in (1, 2, 3):
        t.start(5, p)
    t.step(20, 1, cause="start")
    for p in (1, 2, 3):
        t.adv(140, p, 1)
    t.enter(150, 1, 2).enter(150, 2, 2).enter(212 if ok else 213, 3, 2)
    return t


@case("latency.crashed_leader")
def _(ok):
    # leader(3) = p3 crashed from the start; bound = tl(3) + R + delta = 176
    t = T("latency.crashed_leader", protocol="pbft-rotation", faulty=[3],
          fault_plan=[{"kind": "byzantine", "pid": 3, "behavior": "crash", "at": 0}])
    who = (1, 2, 4)
    for p in who:
        t.start(101, p)
    t.step(110, 1, who, "start").step(130, 2, who, "batch").step(150, 3, who, "batch")
    for p in who:
        t.adv(174, p, 3)
    t.enter(176, 1, 4).enter(176, 2, 4).enter(176 if ok else 177, 4, 4)
    return t


@case("liveness.completeness")
def _(ok):
    # deadline = max(112, 110 + 24) + 16 = 150
    t = T("liveness.completeness").step(110, 1).recv(112, 1, "BROADCAST", 2, 111, 11)
    if ok:
        t.deliver(150, 1, 1, 11)
    else:
        t.deliver(151, 1, 1, 11)
    return t


@case("liveness.accuracy")
def _(ok):
    t = T("liveness.accuracy").step(110, 1)
    return t.adv(130, 2, 1, "start" if ok else "timer")


@case("liveness.rotation_accuracy")
def _(ok):
    t = T("liveness.rotation_accuracy", protocol="pbft-rotation", init_dur_delivery=24).step(110, 1, cause="start")
    return t.adv(130, 2, 1, "batch" if ok else "timer")


@case("liveness.perpetual_rotation")
def _(ok):
    t = T("liveness.perpetual_rotation", protocol="pbft-rotation", target_view=3)
    t.step(10, 1).step(20, 2)
    return t.step(30, 3) if ok else t


@case("toy.progress", "toy-progress")
def _(ok):
    t = T("toy.progress", protocol="toy-client", target_view=3)
    t.step(10, 1).step(20, 2).step(30, 3, (1, 2) if not ok else (1, 2, 3))
    return t


def main():
    manifest = []
    for prop, (stem, build) in CASES.items():
        for ok in (True, False):
            name = f"{stem}-{'pass' if ok else 'violation'}.jsonl"
            build(ok).write(OUT / name)
            manifest.append({"trace": name, "property": prop, "expect": "pass" if ok else "fail"})
    with open(OUT / "manifest.json", "w") as f:
        json.dump(manifest, f, indent=1)
        f.write("\n")
    print(f"{len(manifest)} traces, {len(CASES)} properties")


if __name__ == "__main__":
    main()
