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

#ifndef QNET_TAGS_HPP
#define QNET_TAGS_HPP

#include <concepts>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qnet/engine.hpp"

namespace qnet {

/// Interned name. Equality is pointer equality on the interned string.
class Symbol {
   public:
    Symbol();
    explicit Symbol(std::string_view name);
    const std::string &name() const {
        return *name_;
    }
    bool operator==(const Symbol &o) const {
        return name_ == o.name_;
    }
    /// Orders by name so that maps of symbols iterate deterministically.
    bool operator<(const Symbol &o) const {
        return *name_ < *o.name_;
    }

   private:
    const std::string *name_;
};

/// A tag field: an integer or a symbol.
class Value {
   public:
    template <std::integral I>
    Value(I v) : v_(static_cast<std::int64_t>(v)) {
    }
    Value(Symbol s) : v_(s) {
    }
    bool is_int() const {
        return std::holds_alternative<std::int64_t>(v_);
    }
    std::int64_t as_int() const;
    Symbol as_symbol() const;
    bool operator==(const Value &o) const = default;
    std::string str() const;

   private:
    std::variant<std::int64_t, Symbol> v_;
};

struct Tag {
    static constexpr std::size_t max_fields = 8;

    Symbol type;
    std::vector<Value> fields;

    Tag() = default;
    Tag(Symbol t, std::vector<Value> f = {}) : type(t), fields(std::move(f)) {
    }
    std::int64_t operator[](std::size_t i) const {
        return fields.at(i).as_int();
    }
    bool operator==(const Tag &o) const = default;
    std::string str() const;
};

enum class FieldKind { integer, symbol };

/// Field layout per tag type. A type's layout is fixed by its first use.
class TagSchemas {
   public:
    void define(Symbol type, std::vector<FieldKind> kinds);
    /// Throws "tag-schema-violation" when `t` disagrees with its type's layout.
    void check(const Tag &t);
    const std::vector<FieldKind> *find(Symbol type) const;
    std::size_t field_count(Symbol type) const;

   private:
    std::map<Symbol, std::vector<FieldKind>> kinds_;
};

/// Tag types shared by the bundled protocols.
namespace vocab {
inline const Symbol Counterpart{"EntanglementCounterpart"};
inline const Symbol UpdateX{"EntanglementUpdateX"};
inline const Symbol UpdateZ{"EntanglementUpdateZ"};
inline const Symbol History{"EntanglementHistory"};
inline const Symbol Delete{"EntanglementDelete"};
inline const Symbol SwapRequest{"SwapRequest"};
inline const Symbol GraphStateStorage{"GraphStateStorage"};
inline const Symbol PurifierResults{"PurifierBellMeasurementResults"};
inline const Symbol PurifiedCounterpart{"PurifiedEntanglementCounterpart"};
inline const Symbol Distilled{"DistilledTag"};
inline const Symbol Flow{"Flow"};
inline const Symbol QDatagram{"QDatagram"};
inline const Symbol LinkRequest{"LinkLevelRequest"};
inline const Symbol LinkReply{"LinkLevelReply"};
inline const Symbol LinkReplyAtHop{"LinkLevelReplyAtHop"};
inline const Symbol QDatagramSuccess{"QDatagramSuccess"};
inline const Symbol ConsumeLog{"ConsumeLog"};

void define_all(TagSchemas &schemas);
}  // namespace vocab

/// One field matcher of a query.
class Matcher {
   public:
    Matcher() = default;
    template <std::integral I>
    Matcher(I v) : exact_(Value(v)) {
    }
    Matcher(Symbol s) : exact_(Value(s)) {
    }
    Matcher(Value v) : exact_(v) {
    }
    static Matcher pred(std::function<bool(const Value &)> fn);
    bool accepts(const Value &v) const;

   private:
    std::optional<Value> exact_;
    std::function<bool(const Value &)> pred_;
};

/// Field wildcard.
inline const Matcher W{};

/// Matches values different from `v`.
Matcher ne(Value v);
/// Matches integers in [lo, hi].
Matcher in_range(std::int64_t lo, std::int64_t hi);

struct QueryPattern {
    Symbol type;
    std::vector<Matcher> fields;

    QueryPattern(Symbol t, std::vector<Matcher> f = {}) : type(t), fields(std::move(f)) {
    }
    bool matches(const Tag &t) const;
};

struct TagEntry {
    Tag tag;
    std::uint64_t id = 0;
    std::uint64_t seq = 0;
    SimTime time = 0;
};

/// Per-simulation tag state: schemas and the entry id counter.
struct TagSpace {
    explicit TagSpace(Engine &e) : engine(&e) {
        vocab::define_all(schemas);
    }
    Engine *engine;
    TagSchemas schemas;
    std::uint64_t next_id = 1;
};

/// Anything tags can be attached to (a register slot or a message buffer).
class Taggable {
   public:
    Taggable(TagSpace &space, std::shared_ptr<Signal> signal) : space_(&space), signal_(std::move(signal)) {
    }

    std::uint64_t tag(Tag t);
    bool untag(std::uint64_t id);
    /// Oldest match.
    std::optional<TagEntry> query(const QueryPattern &p) const;
    std::vector<TagEntry> queryall(const QueryPattern &p) const;
    /// Removes and returns the oldest match.
    std::optional<TagEntry> querydelete(const QueryPattern &p);
    void clear();

    const std::vector<TagEntry> &entries() const {
        return entries_;
    }
    const std::shared_ptr<Signal> &signal() const {
        return signal_;
    }
    Condition onchange() const {
        return Condition::changed(signal_);
    }
    Condition querywait(QueryPattern p) const;

   private:
    TagSpace *space_;
    std::shared_ptr<Signal> signal_;
    std::vector<TagEntry> entries_;
    std::uint64_t next_seq_ = 0;
};

}  // namespace qnet

#endif
