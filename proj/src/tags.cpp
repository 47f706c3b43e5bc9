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

#include "qnet/tags.hpp"

#include <deque>
#include <mutex>
#include <unordered_map>

#include "qnet/error.hpp"

namespace qnet {

namespace {

// Names are never freed; the pool is shared by all simulations in a process.
struct SymbolPool {
    std::mutex mu;
    std::deque<std::string> names;
    std::unordered_map<std::string_view, const std::string *> index;

    const std::string *intern(std::string_view name) {
        std::lock_guard<std::mutex> guard(mu);
        auto it = index.find(name);
        if (it != index.end()) {
            return it->second;
        }
        const std::string *p = &names.emplace_back(name);
        index.emplace(*p, p);
        return p;
    }
};

SymbolPool &pool() {
    static SymbolPool p;
    return p;
}

}  // namespace

Symbol::Symbol() : name_(pool().intern("")) {
}

Symbol::Symbol(std::string_view name) : name_(pool().intern(name)) {
}

std::int64_t Value::as_int() const {
    if (!is_int()) {
        throw Error("tag-schema-violation", "field " + str() + " is not an integer");
    }
    return std::get<std::int64_t>(v_);
}

Symbol Value::as_symbol() const {
    if (is_int()) {
        throw Error("tag-schema-violation", "field " + str() + " is not a symbol");
    }
    return std::get<Symbol>(v_);
}

std::string Value::str() const {
    if (is_int()) {
        return std::to_string(std::get<std::int64_t>(v_));
    }
    return ":" + std::get<Symbol>(v_).name();
}

std::string Tag::str() const {
    std::string out = type.name() + "(";
    for (std::size_t i = 0; i < fields.size(); i++) {
        out += (i ? ", " : "") + fields[i].str();
    }
    return out + ")";
}

void TagSchemas::define(Symbol type, std::vector<FieldKind> kinds) {
    if (kinds.size() > Tag::max_fields) {
        throw Error("tag-schema-violation", type.name() + " has more than 8 fields");
    }
    auto it = kinds_.find(type);
    if (it != kinds_.end()) {
        if (it->second != kinds) {
            throw Error("tag-schema-violation", type.name() + " is already registered with another layout");
        }
        return;
    }
    kinds_.emplace(type, std::move(kinds));
}

void TagSchemas::check(const Tag &t) {
    std::vector<FieldKind> kinds;
    for (const auto &f : t.fields) {
        kinds.push_back(f.is_int() ? FieldKind::integer : FieldKind::symbol);
    }
    auto it = kinds_.find(t.type);
    if (it == kinds_.end()) {
        define(t.type, std::move(kinds));
        return;
    }
    if (it->second != kinds) {
        throw Error("tag-schema-violation", t.str() + " does not fit the registered layout of " + t.type.name());
    }
}

const std::vector<FieldKind> *TagSchemas::find(Symbol type) const {
    auto it = kinds_.find(type);
    return it == kinds_.end() ? nullptr : &it->second;
}

std::size_t TagSchemas::field_count(Symbol type) const {
    const auto *k = find(type);
    return k ? k->size() : 0;
}

namespace vocab {

void define_all(TagSchemas &s) {
    auto ints = [](std::size_t n) { return std::vector<FieldKind>(n, FieldKind::integer); };
    // (remote node, remote slot)
    s.define(Counterpart, ints(2));
    // (past remote node, past remote slot, local slot, new remote node, new remote slot, correction bit)
    s.define(UpdateX, ints(6));
    s.define(UpdateZ, ints(6));
    // (past remote node, past remote slot, swap remote node, swap remote slot, swapped local slot)
    s.define(History, ints(5));
    // (sending node, sending slot, receiving node, receiving slot)
    s.define(Delete, ints(4));
    s.define(SwapRequest, {});
    // (uuid, vertex)
    s.define(GraphStateStorage, ints(2));
    // (session uuid, node, XX word, ZZ word)
    s.define(PurifierResults, ints(4));
    // (remote node, remote slot)
    s.define(PurifiedCounterpart, ints(2));
    s.define(Distilled, ints(2));
    // (src, dst, npairs, uuid)
    s.define(Flow, ints(4));
    // (uuid, flow src, flow dst, correction, seq, slot, start time in ns)
    s.define(QDatagram, ints(7));
    // (uuid, seq, requesting node, peer node)
    s.define(LinkRequest, ints(4));
    // (uuid, seq, slot)
    s.define(LinkReply, ints(3));
    s.define(LinkReplyAtHop, ints(3));
    // (uuid, seq, start time in ns, source slot)
    s.define(QDatagramSuccess, ints(4));
    // (uuid, seq, slot)
    s.define(ConsumeLog, ints(3));
}

}  // namespace vocab

Matcher Matcher::pred(std::function<bool(const Value &)> fn) {
    Matcher m;
    m.pred_ = std::move(fn);
    return m;
}

bool Matcher::accepts(const Value &v) const {
    if (exact_) {
        return *exact_ == v;
    }
    if (pred_) {
        return pred_(v);
    }
    return true;
}

Matcher ne(Value v) {
    return Matcher::pred([v](const Value &x) { return !(x == v); });
}

Matcher in_range(std::int64_t lo, std::int64_t hi) {
    return Matcher::pred([lo, hi](const Value &x) { return x.is_int() && x.as_int() >= lo && x.as_int() <= hi; });
}

bool QueryPattern::matches(const Tag &t) const {
    if (!(t.type == type) || fields.size() > t.fields.size()) {
        return false;
    }
    for (std::size_t i = 0; i < fields.size(); i++) {
        if (!fields[i].accepts(t.fields[i])) {
            return false;
        }
    }
    return true;
}

std::uint64_t Taggable::tag(Tag t) {
    space_->schemas.check(t);
    TagEntry e;
    e.tag = std::move(t);
    e.id = space_->next_id++;
    e.seq = next_seq_++;
    e.time = space_->engine->now();
    entries_.push_back(std::move(e));
    signal_->notify();
    return entries_.back().id;
}

bool Taggable::untag(std::uint64_t id) {
    for (auto it = entries_.begin(); it != entries_.end(); ++it) {
        if (it->id == id) {
            entries_.erase(it);
            signal_->notify();
            return true;
        }
    }
    return false;
}

std::optional<TagEntry> Taggable::query(const QueryPattern &p) const {
    for (const auto &e : entries_) {
        if (p.matches(e.tag)) {
            return e;
        }
    }
    return std::nullopt;
}

std::vector<TagEntry> Taggable::queryall(const QueryPattern &p) const {
    std::vector<TagEntry> out;
    for (const auto &e : entries_) {
        if (p.matches(e.tag)) {
            out.push_back(e);
        }
    }
    return out;
}

std::optional<TagEntry> Taggable::querydelete(const QueryPattern &p) {
    for (auto it = entries_.begin(); it != entries_.end(); ++it) {
        if (p.matches(it->tag)) {
            TagEntry e = std::move(*it);
            entries_.erase(it);
            signal_->notify();
            return e;
        }
    }
    return std::nullopt;
}

void Taggable::clear() {
    if (!entries_.empty()) {
        entries_.clear();
        signal_->notify();
    }
}

Condition Taggable::querywait(QueryPattern p) const {
    return Condition::query(signal_, [this, p = std::move(p)] { return query(p).has_value(); });
}

}  // namespace qnet
