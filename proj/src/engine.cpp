// Copyright 2026 The qnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qnet/engine.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

namespace qnet {

namespace detail {

// Node in the registration tree built when a process awaits a condition.
// The engine owns the root until the process is resumed; sources (timers,
// signals, locks, finished processes) only hold weak references to leaves.
struct WaitNode {
    enum class Kind { root, leaf, all, any };
    Kind kind = Kind::leaf;
    WaitNode *parent = nullptr;
    std::size_t index = 0;
    std::vector<std::shared_ptr<WaitNode>> children;
    std::vector<Wake> results;
    std::size_t remaining = 0;
    bool settled = false;
    Engine *engine = nullptr;
    ProcessId pid = 0;

    void fire(Wake w);
    void cancel();
    void child_fired(std::size_t i, Wake w);
};

void WaitNode::fire(Wake w) {
    if (settled) {
        return;
    }
    settled = true;
    if (kind == Kind::root) {
        engine->wake(pid, std::move(w));
        return;
    }
    parent->child_fired(index, std::move(w));
}

void WaitNode::cancel() {
    if (settled) {
        return;
    }
    settled = true;
    for (auto &c : children) {
        c->cancel();
    }
}

void WaitNode::child_fired(std::size_t i, Wake w) {
    if (settled) {
        return;
    }
    switch (kind) {
        case Kind::root:
            fire(std::move(w));
            break;
        case Kind::all:
            results[i] = std::move(w);
            if (--remaining == 0) {
                Wake out;
                out.children = std::move(results);
                fire(std::move(out));
            }
            break;
        case Kind::any: {
            for (std::size_t k = 0; k < children.size(); k++) {
                if (k != i) {
                    children[k]->cancel();
                }
            }
            Wake out;
            out.index = i;
            out.target_gone = w.target_gone;
            out.children.push_back(std::move(w));
            fire(std::move(out));
            break;
        }
        case Kind::leaf:
            break;
    }
}

}  // namespace detail

using detail::WaitNode;

Signal::~Signal() {
    if (engine_->tearing_down_) {
        return;
    }
    Wake gone;
    gone.target_gone = true;
    for (auto &s : subs_) {
        if (auto n = s.node.lock()) {
            n->fire(gone);
        }
    }
}

void Signal::notify() {
    if (pending_ || subs_.empty()) {
        return;
    }
    pending_ = true;
    engine_->schedule(0, [w = weak_from_this()] {
        if (auto s = w.lock()) {
            s->flush();
        }
    });
}

void Signal::flush() {
    pending_ = false;
    std::vector<Subscriber> subs = std::move(subs_);
    subs_.clear();
    std::vector<Subscriber> keep;
    for (auto &s : subs) {
        auto n = s.node.lock();
        if (!n || n->settled) {
            continue;
        }
        if (s.check && !s.check()) {
            keep.push_back(std::move(s));
            continue;
        }
        n->fire(Wake{});
    }
    keep.insert(keep.end(), std::make_move_iterator(subs_.begin()), std::make_move_iterator(subs_.end()));
    subs_ = std::move(keep);
}

Condition Condition::timeout(SimTime delay) {
    if (!(delay >= 0) || !std::isfinite(delay)) {
        throw Error("invalid-condition", "timeout delay must be finite and nonnegative");
    }
    Condition c(Kind::timeout);
    c.delay_ = delay;
    return c;
}

Condition Condition::changed(const std::shared_ptr<Signal> &signal) {
    Condition c(Kind::changed);
    c.signal_ = signal;
    return c;
}

Condition Condition::query(const std::shared_ptr<Signal> &signal, std::function<bool()> matched) {
    Condition c(Kind::query);
    c.signal_ = signal;
    c.check_ = std::move(matched);
    return c;
}

Condition Condition::lock(const std::shared_ptr<Lock> &lock) {
    Condition c(Kind::lock);
    c.lock_ = lock;
    return c;
}

Condition Condition::done(ProcessId pid) {
    Condition c(Kind::done);
    c.pid_ = pid;
    return c;
}

Condition Condition::all_of(std::vector<Condition> children) {
    Condition c(Kind::all);
    c.children_ = std::move(children);
    return c;
}

Condition Condition::any_of(std::vector<Condition> children) {
    if (children.empty()) {
        throw Error("invalid-condition", "any_of needs at least one child");
    }
    Condition c(Kind::any);
    c.children_ = std::move(children);
    return c;
}

Condition operator&(Condition a, Condition b) {
    return Condition::all_of({std::move(a), std::move(b)});
}

Condition operator|(Condition a, Condition b) {
    return Condition::any_of({std::move(a), std::move(b)});
}

void ConditionAwaiter::await_suspend(Process::Handle h) {
    handle = h;
    h.promise().engine->arm(h.promise().id, cond);
}

Engine::Engine(std::uint64_t seed) : rng_(seed) {
}

Engine::~Engine() {
    tearing_down_ = true;
    for (auto &[pid, rec] : procs_) {
        rec.root.reset();
        if (rec.handle) {
            rec.handle.destroy();
            rec.handle = {};
        }
    }
}

void Engine::schedule(SimTime delay, std::function<void()> fn) {
    queue_.push(Event{now_ + delay, seq_++, std::move(fn)});
}

ProcessId Engine::spawn(Process p, std::string name) {
    if (closed_) {
        throw Error("engine-closed", name);
    }
    ProcessId pid = ++next_pid_;
    Process::Handle h = std::exchange(p.h_, {});
    h.promise().engine = this;
    h.promise().id = pid;
    Record rec;
    rec.handle = h;
    rec.name = std::move(name);
    procs_.emplace(pid, std::move(rec));
    live_++;
    trace(pid, "spawn", procs_.at(pid).name);
    schedule(0, [this, pid] { resume(pid, Wake{}); });
    return pid;
}

bool Engine::step() {
    if (queue_.empty()) {
        return false;
    }
    Event ev = queue_.top();
    queue_.pop();
    now_ = ev.time;
    processed_++;
    ev.fn();
    return true;
}

SimTime Engine::run_until(SimTime t_end) {
    if (t_end < now_) {
        throw Error("clock-regression", "run_until target lies in the past");
    }
    bool any = false;
    SimTime last = now_;
    while (!stopped_ && !queue_.empty() && queue_.top().time <= t_end) {
        step();
        any = true;
        last = now_;
    }
    if (!stopped_ && std::isfinite(t_end)) {
        now_ = t_end;
    }
    return any ? last : t_end;
}

SimTime Engine::run() {
    SimTime last = now_;
    while (!stopped_ && step()) {
        last = now_;
    }
    return last;
}

void Engine::wake(ProcessId pid, Wake w) {
    schedule(0, [this, pid, w = std::move(w)]() mutable { resume(pid, std::move(w)); });
}

void Engine::resume(ProcessId pid, Wake w) {
    auto it = procs_.find(pid);
    if (it == procs_.end() || it->second.finished) {
        return;
    }
    Record &rec = it->second;
    rec.root.reset();
    rec.handle.promise().wake = std::move(w);
    ProcessId prev = current_;
    current_ = pid;
    trace(pid, "resume", rec.name);
    rec.handle.resume();
    current_ = prev;
    if (!rec.handle.done()) {
        return;
    }
    auto &promise = rec.handle.promise();
    std::exception_ptr error = promise.error;
    rec.result = std::move(promise.result);
    rec.finished = true;
    live_--;
    rec.handle.destroy();
    rec.handle = {};
    trace(pid, "done", rec.name);
    std::vector<std::weak_ptr<WaitNode>> waiters = std::move(rec.done_waiters);
    for (auto &wn : waiters) {
        if (auto n = wn.lock()) {
            Wake d;
            d.value = procs_.at(pid).result;
            n->fire(std::move(d));
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

std::shared_ptr<WaitNode> Engine::build(const Condition &c, WaitNode *parent, std::size_t index,
                                        std::vector<std::pair<std::shared_ptr<WaitNode>, const Condition *>> &leaves) {
    auto node = std::make_shared<WaitNode>();
    node->parent = parent;
    node->index = index;
    node->engine = this;
    if (c.kind_ == Condition::Kind::all || c.kind_ == Condition::Kind::any) {
        node->kind = c.kind_ == Condition::Kind::all ? WaitNode::Kind::all : WaitNode::Kind::any;
        node->remaining = c.children_.size();
        node->results.resize(c.children_.size());
        for (std::size_t i = 0; i < c.children_.size(); i++) {
            node->children.push_back(build(c.children_[i], node.get(), i, leaves));
        }
    } else {
        leaves.emplace_back(node, &c);
    }
    return node;
}

void Engine::arm(ProcessId pid, const Condition &c) {
    Record &rec = procs_.at(pid);
    auto root = std::make_shared<WaitNode>();
    root->kind = WaitNode::Kind::root;
    root->engine = this;
    root->pid = pid;
    std::vector<std::pair<std::shared_ptr<WaitNode>, const Condition *>> leaves;
    root->children.push_back(build(c, root.get(), 0, leaves));
    rec.root = root;
    if (c.kind_ == Condition::Kind::all && c.children_.empty()) {
        root->fire(Wake{});
        return;
    }
    for (auto &[leaf, cond] : leaves) {
        if (!leaf->settled) {
            register_leaf(pid, leaf, *cond);
        }
    }
}

void Engine::register_leaf(ProcessId pid, const std::shared_ptr<WaitNode> &leaf, const Condition &c) {
    Wake gone;
    gone.target_gone = true;
    switch (c.kind_) {
        case Condition::Kind::timeout:
            schedule(c.delay_, [w = std::weak_ptr<WaitNode>(leaf)] {
                if (auto n = w.lock()) {
                    n->fire(Wake{});
                }
            });
            break;
        case Condition::Kind::changed:
        case Condition::Kind::query: {
            auto sig = c.signal_.lock();
            if (!sig) {
                leaf->fire(gone);
                break;
            }
            if (c.kind_ == Condition::Kind::query && c.check_()) {
                leaf->fire(Wake{});
                break;
            }
            sig->subs_.push_back(Signal::Subscriber{leaf, c.check_});
            break;
        }
        case Condition::Kind::lock: {
            auto lk = c.lock_.lock();
            if (!lk) {
                leaf->fire(gone);
                break;
            }
            if (!lk->holder_) {
                lk->holder_ = pid;
                trace(pid, "lock-grant", lk->name());
                leaf->fire(Wake{});
            } else {
                lk->queue_.push_back(Lock::Request{pid, leaf});
            }
            break;
        }
        case Condition::Kind::done: {
            auto it = procs_.find(c.pid_);
            if (it == procs_.end()) {
                leaf->fire(gone);
            } else if (it->second.finished) {
                Wake d;
                d.value = it->second.result;
                leaf->fire(std::move(d));
            } else {
                it->second.done_waiters.push_back(leaf);
            }
            break;
        }
        case Condition::Kind::all:
        case Condition::Kind::any:
            break;
    }
}

void Engine::release(Lock &lock) {
    release(lock, current_);
}

void Engine::release(Lock &lock, ProcessId pid) {
    if (lock.holder_ != pid) {
        throw Error("not-holder", lock.name());
    }
    lock.holder_.reset();
    trace(pid, "lock-release", lock.name());
    while (!lock.queue_.empty()) {
        Lock::Request req = lock.queue_.front();
        lock.queue_.pop_front();
        auto n = req.node.lock();
        if (!n || n->settled) {
            continue;
        }
        lock.holder_ = req.pid;
        trace(req.pid, "lock-grant", lock.name());
        n->fire(Wake{});
        break;
    }
    if (lock.on_release) {
        lock.on_release();
    }
}

bool Engine::finished(ProcessId pid) const {
    auto it = procs_.find(pid);
    return it != procs_.end() && it->second.finished;
}

const std::any *Engine::result(ProcessId pid) const {
    auto it = procs_.find(pid);
    if (it == procs_.end() || !it->second.finished) {
        return nullptr;
    }
    return &it->second.result;
}

void Engine::trace(ProcessId pid, const std::string &kind, const std::string &detail) {
    if (tracing_) {
        trace_.push_back(TraceEvent{now_, pid, kind, detail});
    }
}

void Engine::write_trace(std::ostream &out) const {
    for (const auto &e : trace_) {
        nlohmann::json j = {{"t", e.time}, {"pid", e.pid}, {"kind", e.kind}, {"detail", e.detail}};
        out << j.dump() << '\n';
    }
}

}  // namespace qnet
