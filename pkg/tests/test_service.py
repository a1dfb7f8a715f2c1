import asyncio

import pytest

from membooth.errors import MissingCorpusInput
from membooth.matching import DEFAULT_THETA
from membooth.memory import MemoryStore
from membooth.protocol import ProtocolMessage, read_frame, write_frame
from membooth.scenario import ScenarioConfig, run_scenario_session
from membooth.service import SessionService, _parse_schedule
from membooth.stream import ChunkPolicy, JitterSpec, StreamSession, parse_mode

CORPUS = "corpus"


async def dialogue(opening, *, raw_first=None, on_frame=None):
    """One client conversation; returns every server frame until EOF."""
    service = SessionService(CORPUS)
    host, port = await service.start()
    try:
        reader, writer = await asyncio.open_connection(host, port)
        if raw_first is not None:
            writer.write(raw_first)
            await writer.drain()
        else:
            await write_frame(writer, opening)
        frames = []
        while True:
            msg = await read_frame(reader)
            if msg is None:
                break
            frames.append(msg)
            if on_frame is not None:
                await on_frame(msg, writer)
        writer.close()
        try:
            await writer.wait_closed()
        except (ConnectionResetError, BrokenPipeError):
            pass
        return frames
    finally:
        await service.stop()


def start_msg(payload):
    return ProtocolMessage(kind="session_start", seq=0, payload=payload)


def kinds(frames):
    return [f.kind for f in frames]


def batch_transcript(corpus, script, *, seed, jitter=None, mode="ship",
                     schedule=None):
    session = StreamSession(
        script=corpus.get(script).script,
        policy=ChunkPolicy(min_chunk_ms=1000,
                           jitter=jitter if jitter is not None else JitterSpec()),
        store=MemoryStore(),
        theta=DEFAULT_THETA,
        mode=parse_mode(mode),
        schedule=schedule or [],
        seed=seed,
    ).run()
    return session.transcript_display()


# -- handshake and full stream ---------------------------------------------

def test_full_session_stream(corpus):
    frames = asyncio.run(dialogue(start_msg(
        {"script": "demo01", "seed": 1, "realtime": False})))
    ks = kinds(frames)
    assert ks[0] == "session_start"
    assert frames[0].payload["script"] == "demo01"
    assert frames[0].payload["mode"] == "ship_immediately"
    assert ks[1] == "memory_state"
    assert frames[1].payload == {"version": 0, "entries": [], "trigger": None}
    assert [f.seq for f in frames] == list(range(len(frames)))
    assert ks[-2:] == ["metrics_update", "session_end"]
    metrics = frames[-2].payload
    assert metrics["final"] is True and "wer" in metrics and "f1" in metrics
    end = frames[-1].payload
    assert end["reason"] == "complete"
    assert end["n_segments"] == sum(1 for k in ks if k == "transcript_stable")
    assert end["n_retractions"] == 0
    assert "decode" not in ks  # decode events stay internal
    assert end["transcript"] == batch_transcript(corpus, "demo01", seed=1)


def test_stable_frames_carry_segments(corpus):
    frames = asyncio.run(dialogue(start_msg(
        {"script": "demo01", "seed": 1, "realtime": False})))
    stables = [f for f in frames if f.kind == "transcript_stable"]
    assert stables
    seg = stables[0].payload["segment"]
    assert {"segment_id", "tokens", "status", "cased"} <= set(seg)
    partials = [f for f in frames if f.kind == "transcript_partial"]
    for p in partials:
        assert {"chunk_id", "from_ms", "to_ms", "tokens"} <= set(p.payload)


# -- option validation ------------------------------------------------------

def test_unknown_option_rejected():
    frames = asyncio.run(dialogue(start_msg({"script": "demo01", "bogus": 1})))
    assert kinds(frames) == ["error"]
    assert "unknown session options" in frames[0].payload["message"]


def test_unknown_script_rejected():
    frames = asyncio.run(dialogue(start_msg({"script": "nope99"})))
    assert kinds(frames) == ["error"]
    assert "cannot start session" in frames[0].payload["message"]


def test_first_frame_must_be_session_start():
    frames = asyncio.run(dialogue(
        ProtocolMessage(kind="memory_add", seq=0, payload={"surface": "x"})))
    assert kinds(frames) == ["error"]
    assert "expected session_start" in frames[0].payload["message"]


def test_malformed_first_frame():
    frames = asyncio.run(dialogue(None, raw_first=b"zz\n"))
    assert kinds(frames) == ["error"]


def test_bad_corpus_root_fails_fast():
    async def scenario():
        with pytest.raises(MissingCorpusInput):
            await SessionService("/nonexistent/corpus").start()
    asyncio.run(scenario())


# -- scheduled mutations and retraction ------------------------------------

def test_scheduled_add_causes_retraction(corpus):
    # the segment holding "neo graf" is emitted at 4000 and stays retractable
    # until 9000; an add at 4500 lands inside that window
    schedule = [{"at_ms": 4500, "surface": "NeoGraph", "aliases": ["neo graf"]}]
    opts = {"script": "demo01", "seed": 1, "realtime": False, "jitter": "none",
            "mode": "delay:5000", "schedule": schedule}
    frames = asyncio.run(dialogue(start_msg(opts)))
    ks = kinds(frames)
    assert "transcript_retract" in ks

    retract = next(f for f in frames if f.kind == "transcript_retract")
    prior_ids = {
        f.payload["segment"]["segment_id"]
        for f in frames[:frames.index(retract)] if f.kind == "transcript_stable"
    }
    assert retract.payload["segment_id"] in prior_ids

    states = [f for f in frames if f.kind == "memory_state"]
    triggered = [s for s in states if s.payload["trigger"]]
    assert triggered and triggered[0].payload["trigger"]["origin"] == "replay"
    assert triggered[0].payload["version"] == 1

    end = frames[-1].payload
    assert end["n_retractions"] >= 1
    assert "NeoGraph" in end["transcript"]
    want = batch_transcript(
        corpus, "demo01", seed=1, jitter=JitterSpec(kind="none"),
        mode="delay:5000", schedule=_parse_schedule(schedule),
    )
    assert end["transcript"] == want


def test_approach_option_builds_initial_memory(corpus):
    opts = {"script": "alias01", "approach": "alias_memory",
            "seed": 2, "realtime": False}
    frames = asyncio.run(dialogue(start_msg(opts)))
    first_state = next(f for f in frames if f.kind == "memory_state")
    assert first_state.payload["version"] == 0  # adds are scheduled, not instant
    later = [f for f in frames if f.kind == "memory_state"
             and f.payload["version"] > 0]
    assert later and all(s.payload["trigger"]["origin"] == "alias_file"
                         for s in later)

    config = ScenarioConfig(approach="alias_memory", scripts=("alias01",),
                            seeds=(2,))
    session, _ = run_scenario_session(config, corpus.get("alias01"), seed=2)
    assert frames[-1].payload["transcript"] == session.transcript_display()


# -- live client mutations --------------------------------------------------

def test_client_add_and_remove_are_acknowledged():
    sent = {"add": False, "remove": False}

    async def on_frame(msg, writer):
        if msg.kind == "memory_state" and msg.payload["trigger"] is None \
                and not sent["add"]:
            sent["add"] = True
            await write_frame(writer, ProtocolMessage(
                kind="memory_add", seq=1,
                payload={"surface": "Zebra", "aliases": ["zee bra"]}))
        elif msg.kind == "memory_state" and not sent["remove"] \
                and msg.payload["trigger"] \
                and msg.payload["trigger"]["origin"] == "client":
            sent["remove"] = True
            await write_frame(writer, ProtocolMessage(
                kind="memory_remove", seq=2, payload={"surface": "Zebra"}))

    opts = {"script": "demo01", "seed": 1, "realtime": True, "time_scale": 25}
    frames = asyncio.run(dialogue(start_msg(opts), on_frame=on_frame))
    client_states = [f for f in frames if f.kind == "memory_state"
                     and f.payload["trigger"]
                     and f.payload["trigger"]["origin"] == "client"]
    assert len(client_states) == 2
    add_state, remove_state = client_states
    assert add_state.payload["version"] == 1
    assert [e["surface"] for e in add_state.payload["entries"]] == ["Zebra"]
    assert add_state.payload["entries"][0]["aliases"] == ["zee bra"]
    assert remove_state.payload["version"] == 2
    assert remove_state.payload["entries"] == []
    assert frames[-1].kind == "session_end"


def test_unexpected_client_kind_aborts_session():
    async def on_frame(msg, writer):
        if msg.kind == "memory_state":
            await write_frame(writer, ProtocolMessage(
                kind="metrics_update", seq=1, payload={}))

    opts = {"script": "demo01", "seed": 1, "realtime": True, "time_scale": 25}
    frames = asyncio.run(dialogue(start_msg(opts), on_frame=on_frame))
    assert frames[-1].kind == "error"
    assert "unexpected metrics_update" in frames[-1].payload["message"]
    assert "session_end" not in kinds(frames)
