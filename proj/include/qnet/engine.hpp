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

#ifndef QNET_ENGINE_HPP
#define QNET_ENGINE_HPP

#include <any>
#include <coroutine>
#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "qnet/error.hpp"

namespace qnet {

/// Simulation time in seconds.
using SimTime = double;
using ProcessId = std::uint64_t;

class Engine;

/// Seeded random stream owned by one simulation.
///
/// The float conversion is done here rather than through a standard
/// distribution so that draws are identical across standard libraries.
class Rng {
   public:
    explicit Rng(std::uint64_t seed) : gen_(seed), seed_(seed) {
    }
    std::uint64_t next() {
        return gen_();
    }
    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }
    bool bernoulli(double p) {
        return p >= 1.0 || uniform() < p;
    }
    /// Uniform integer in [0, n).
    std::size_t below(std::size_t n) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n));
    }
    std::uint64_t seed() const {
        return seed_;
    }

   private:
    std::mt19937_64 gen_;
    std::uint64_t seed_;
};

/// What a process receives back from `co_await condition`.
struct Wake {
    /// AnyOf: position of the child that fired.
    std::size_t index = 0;
    /// AllOf: one payload per child. AnyOf: the winning child's payload.
    std::vector<Wake> children;
    /// ProcessDone: result of the finished process.
    std::any value;
    /// The awaited signal, lock or process no longer exists.
    bool target_gone = false;
};

struct TraceEvent {
    SimTime time;
    ProcessId pid;
    std::string kind;
    std::string detail;
};

namespace detail {
struct WaitNode;
}

/// Broadcast change notification.
///
/// `notify()` is batched: any number of notifications within one event wake
/// each subscriber once, in a flush event scheduled at the current time.
class Signal : public std::enable_shared_from_this<Signal> {
   public:
    static std::shared_ptr<Signal> create(Engine &engine) {
        return std::shared_ptr<Signal>(new Signal(engine));
    }
    ~Signal();
    Signal(const Signal &) = delete;
    Signal &operator=(const Signal &) = delete;

    void notify();
    std::size_t subscribers() const {
        return subs_.size();
    }

   private:
    friend class Engine;
    explicit Signal(Engine &engine) : engine_(&engine) {
    }
    struct Subscriber {
        std::weak_ptr<detail::WaitNode> node;
        std::function<bool()> check;
    };
    void flush();

    Engine *engine_;
    std::vector<Subscriber> subs_;
    bool pending_ = false;
};

/// FIFO mutual-exclusion lock, normally one per register slot.
class Lock {
   public:
    static std::shared_ptr<Lock> create(std::string name) {
        return std::make_shared<Lock>(std::move(name));
    }
    explicit Lock(std::string name) : name_(std::move(name)) {
    }
    std::optional<ProcessId> holder() const {
        return holder_;
    }
    bool locked() const {
        return holder_.has_value();
    }
    const std::string &name() const {
        return name_;
    }
    /// Called after every release (used by registers to raise their change signal).
    std::function<void()> on_release;

   private:
    friend class Engine;
    struct Request {
        ProcessId pid;
        std::weak_ptr<detail::WaitNode> node;
    };
    std::string name_;
    std::optional<ProcessId> holder_;
    std::deque<Request> queue_;
};

class Process;
struct ConditionAwaiter;

/// A wake-up condition a process can `co_await`.
///
/// Conditions are plain descriptions; they only register with their sources
/// when awaited.
class Condition {
   public:
    static Condition timeout(SimTime delay);
    static Condition changed(const std::shared_ptr<Signal> &signal);
    /// Fires once `matched()` holds, re-checked after every change of `signal`.
    static Condition query(const std::shared_ptr<Signal> &signal, std::function<bool()> matched);
    static Condition lock(const std::shared_ptr<Lock> &lock);
    static Condition done(ProcessId pid);
    static Condition all_of(std::vector<Condition> children);
    /// First child to fire wins; the others are cancelled.
    static Condition any_of(std::vector<Condition> children);

    friend Condition operator&(Condition a, Condition b);
    friend Condition operator|(Condition a, Condition b);

    ConditionAwaiter operator co_await() const &;
    ConditionAwaiter operator co_await() &&;

   private:
    friend class Engine;
    enum class Kind { timeout, changed, query, lock, done, all, any };
    explicit Condition(Kind k) : kind_(k) {
    }
    Kind kind_;
    SimTime delay_ = 0;
    std::weak_ptr<Signal> signal_;
    std::function<bool()> check_;
    std::weak_ptr<Lock> lock_;
    ProcessId pid_ = 0;
    std::vector<Condition> children_;
};

/// Coroutine type for simulation processes. Bodies end with `co_return value;`
/// (any type, or `{}` for none).
class Process {
   public:
    struct promise_type {
        Engine *engine = nullptr;
        ProcessId id = 0;
        Wake wake;
        std::any result;
        std::exception_ptr error;

        Process get_return_object() {
            return Process(std::coroutine_handle<promise_type>::from_promise(*this));
        }
        std::suspend_always initial_suspend() noexcept {
            return {};
        }
        std::suspend_always final_suspend() noexcept {
            return {};
        }
        void return_value(std::any v) {
            result = std::move(v);
        }
        void unhandled_exception() {
            error = std::current_exception();
        }
    };
    using Handle = std::coroutine_handle<promise_type>;

    Process(Process &&other) noexcept : h_(std::exchange(other.h_, {})) {
    }
    Process &operator=(Process &&other) noexcept {
        if (this != &other) {
            if (h_) {
                h_.destroy();
            }
            h_ = std::exchange(other.h_, {});
        }
        return *this;
    }
    Process(const Process &) = delete;
    ~Process() {
        if (h_) {
            h_.destroy();
        }
    }

   private:
    friend class Engine;
    explicit Process(Handle h) : h_(h) {
    }
    Handle h_;
};

struct ConditionAwaiter {
    Condition cond;
    Process::Handle handle{};

    bool await_ready() const noexcept {
        return false;
    }
    void await_suspend(Process::Handle h);
    Wake await_resume() {
        return std::move(handle.promise().wake);
    }
};

inline ConditionAwaiter Condition::operator co_await() const & {
    return ConditionAwaiter{*this};
}
inline ConditionAwaiter Condition::operator co_await() && {
    return ConditionAwaiter{std::move(*this)};
}

inline Condition timeout(SimTime delay) {
    return Condition::timeout(delay);
}

/// Discrete-event scheduler. Events are ordered by (time, insertion counter).
class Engine {
   public:
    explicit Engine(std::uint64_t seed = 0);
    ~Engine();
    Engine(const Engine &) = delete;
    Engine &operator=(const Engine &) = delete;

    SimTime now() const {
        return now_;
    }
    Rng &rng() {
        return rng_;
    }

    /// Registers a process; it first runs at the current time.
    ProcessId spawn(Process p, std::string name = "process");
    /// Processes every event with time <= t_end, then sets the clock to t_end.
    /// Returns the time of the last processed event, or t_end if none ran.
    SimTime run_until(SimTime t_end);
    /// Runs to quiescence and returns the time of the last processed event.
    SimTime run();
    /// Processes one event; false when the queue is empty.
    bool step();
    bool idle() const {
        return queue_.empty();
    }

    void close() {
        closed_ = true;
    }
    bool closed() const {
        return closed_;
    }
    /// Makes `run` and `run_until` return after the current event.
    void stop() {
        stopped_ = true;
    }
    bool stopped() const {
        return stopped_;
    }

    /// Schedules a plain callback `delay` seconds from now.
    void schedule(SimTime delay, std::function<void()> fn);

    /// Process currently executing, or 0 outside any process.
    ProcessId current() const {
        return current_;
    }
    /// Releases `lock` held by the current process.
    void release(Lock &lock);
    void release(Lock &lock, ProcessId pid);

    bool finished(ProcessId pid) const;
    /// Result of a finished process, or nullptr.
    const std::any *result(ProcessId pid) const;
    std::size_t live_processes() const {
        return live_;
    }
    std::uint64_t events_processed() const {
        return processed_;
    }

    void set_tracing(bool on) {
        tracing_ = on;
    }
    bool tracing() const {
        return tracing_;
    }
    void trace(const std::string &kind, const std::string &detail) {
        trace(current_, kind, detail);
    }
    void trace(ProcessId pid, const std::string &kind, const std::string &detail);
    const std::vector<TraceEvent> &trace_events() const {
        return trace_;
    }
    /// One JSON object per line: {"t":..,"pid":..,"kind":..,"detail":..}.
    void write_trace(std::ostream &out) const;

   private:
    friend class Signal;
    friend struct ConditionAwaiter;
    friend struct detail::WaitNode;

    struct Event {
        SimTime time;
        std::uint64_t seq;
        std::function<void()> fn;
    };
    struct Later {
        bool operator()(const Event &a, const Event &b) const {
            if (a.time != b.time) {
                return a.time > b.time;
            }
            return a.seq > b.seq;
        }
    };
    struct Record {
        Process::Handle handle;
        std::string name;
        bool finished = false;
        std::any result;
        std::shared_ptr<detail::WaitNode> root;
        std::vector<std::weak_ptr<detail::WaitNode>> done_waiters;
    };

    void arm(ProcessId pid, const Condition &c);
    std::shared_ptr<detail::WaitNode> build(const Condition &c, detail::WaitNode *parent, std::size_t index,
                                            std::vector<std::pair<std::shared_ptr<detail::WaitNode>, const Condition *>> &leaves);
    void register_leaf(ProcessId pid, const std::shared_ptr<detail::WaitNode> &leaf, const Condition &c);
    void wake(ProcessId pid, Wake w);
    void resume(ProcessId pid, Wake w);

    SimTime now_ = 0;
    std::uint64_t seq_ = 0;
    std::uint64_t processed_ = 0;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::map<ProcessId, Record> procs_;
    ProcessId next_pid_ = 0;
    ProcessId current_ = 0;
    std::size_t live_ = 0;
    bool closed_ = false;
    bool stopped_ = false;
    bool tearing_down_ = false;
    bool tracing_ = false;
    std::vector<TraceEvent> trace_;
    Rng rng_;
};

}  // namespace qnet

#endif
