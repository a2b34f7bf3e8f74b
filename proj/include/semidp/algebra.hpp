#pragma once

// Runtime-selectable commutative semirings.
//
//   bool    (B, or, and, F, T)            -- also a dioid, ordered T < F
//   nat     (N, +, *, 0, 1)               -- arbitrary precision
//   trop    (Z u {inf}, min, +, inf, 0)   -- 64-bit costs, overflow checked
//   delta(D, A)                           -- pairs (cost, tally), D a dioid
//   prod(A, B)                            -- cartesian product
//
// A delta value (d, a) always satisfies the packing rule: when d is not
// multiplicatively regular in D, a is the zero of A.

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include <boost/multiprecision/cpp_int.hpp>

#include "errors.hpp"

namespace semidp {

using Natural = boost::multiprecision::cpp_int;

/// An extended cost: a signed 64-bit integer or +infinity.
class Cost {
public:
    constexpr Cost() noexcept = default;
    constexpr Cost(std::int64_t value) noexcept : value_(value) {}  // NOLINT(implicit)

    static constexpr Cost infinity() noexcept {
        Cost c;
        c.infinite_ = true;
        return c;
    }

    constexpr bool is_infinite() const noexcept { return infinite_; }
    constexpr bool is_finite() const noexcept { return !infinite_; }

    std::int64_t value() const {
        if (infinite_) throw UsageError("value() of an infinite cost");
        return value_;
    }

    friend constexpr bool operator==(Cost a, Cost b) noexcept {
        return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
    }

    friend constexpr std::strong_ordering operator<=>(Cost a, Cost b) noexcept {
        if (a.infinite_ || b.infinite_) return a.infinite_ <=> b.infinite_;
        return a.value_ <=> b.value_;
    }

    std::string to_string() const { return infinite_ ? "inf" : std::to_string(value_); }

    friend std::ostream& operator<<(std::ostream& os, Cost c) { return os << c.to_string(); }

private:
    std::int64_t value_ = 0;
    bool infinite_ = false;
};

/// Tropical product: infinity absorbs, finite sums are overflow checked.
inline Cost checked_add(Cost a, Cost b) {
    if (a.is_infinite() || b.is_infinite()) return Cost::infinity();
    std::int64_t out = 0;
    if (__builtin_add_overflow(a.value(), b.value(), &out))
        throw OverflowError("tropical cost overflow: " + a.to_string() + " + " + b.to_string());
    return Cost(out);
}

enum class SemiringKind { boolean, natural, tropical, delta, product };

/// Descriptor of a semiring. Cheap to copy; equality is structural.
class Semiring {
public:
    static Semiring boolean() { return Semiring(leaf(SemiringKind::boolean)); }
    static Semiring natural() { return Semiring(leaf(SemiringKind::natural)); }
    static Semiring tropical() { return Semiring(leaf(SemiringKind::tropical)); }

    /// The delta product of a totally ordered idempotent dioid and a semiring.
    static Semiring delta(const Semiring& dioid, const Semiring& inner);
    static Semiring product(const Semiring& a, const Semiring& b);

    SemiringKind kind() const noexcept;
    const Semiring& first() const;
    const Semiring& second() const;

    /// True for the totally ordered idempotent dioids: bool, trop, and delta
    /// products whose both sides are such dioids.
    bool is_dioid() const noexcept;

    std::string to_string() const;

    friend bool operator==(const Semiring& a, const Semiring& b) noexcept;

    friend std::ostream& operator<<(std::ostream& os, const Semiring& s) { return os << s.to_string(); }

private:
    struct Node;
    explicit Semiring(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    static std::shared_ptr<const Node> leaf(SemiringKind kind);

    std::shared_ptr<const Node> node_;
};

struct Semiring::Node {
    SemiringKind kind;
    std::optional<Semiring> first;
    std::optional<Semiring> second;
};

inline std::shared_ptr<const Semiring::Node> Semiring::leaf(SemiringKind kind) {
    static const auto b = std::make_shared<const Node>(Node{SemiringKind::boolean, {}, {}});
    static const auto n = std::make_shared<const Node>(Node{SemiringKind::natural, {}, {}});
    static const auto t = std::make_shared<const Node>(Node{SemiringKind::tropical, {}, {}});
    switch (kind) {
        case SemiringKind::boolean: return b;
        case SemiringKind::natural: return n;
        default: return t;
    }
}

inline Semiring Semiring::delta(const Semiring& dioid, const Semiring& inner) {
    if (!dioid.is_dioid())
        throw UsageError("delta(" + dioid.to_string() + ", ...): first argument is not a dioid");
    return Semiring(std::make_shared<const Node>(Node{SemiringKind::delta, dioid, inner}));
}

inline Semiring Semiring::product(const Semiring& a, const Semiring& b) {
    return Semiring(std::make_shared<const Node>(Node{SemiringKind::product, a, b}));
}

inline SemiringKind Semiring::kind() const noexcept { return node_->kind; }

inline const Semiring& Semiring::first() const {
    if (!node_->first) throw UsageError(to_string() + " has no components");
    return *node_->first;
}

inline const Semiring& Semiring::second() const {
    if (!node_->second) throw UsageError(to_string() + " has no components");
    return *node_->second;
}

inline bool Semiring::is_dioid() const noexcept {
    switch (kind()) {
        case SemiringKind::boolean:
        case SemiringKind::tropical: return true;
        case SemiringKind::delta: return node_->first->is_dioid() && node_->second->is_dioid();
        default: return false;
    }
}

inline std::string Semiring::to_string() const {
    switch (kind()) {
        case SemiringKind::boolean: return "bool";
        case SemiringKind::natural: return "nat";
        case SemiringKind::tropical: return "trop";
        case SemiringKind::delta: return "delta(" + first().to_string() + "," + second().to_string() + ")";
        case SemiringKind::product: return "prod(" + first().to_string() + "," + second().to_string() + ")";
    }
    return {};
}

inline bool operator==(const Semiring& a, const Semiring& b) noexcept {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    if (a.kind() != SemiringKind::delta && a.kind() != SemiringKind::product) return true;
    return *a.node_->first == *b.node_->first && *a.node_->second == *b.node_->second;
}

class Value;

struct ValuePair;

/// An element of some semiring. Immutable once built.
class Value {
public:
    static Value boolean(bool b) { return Value(Semiring::boolean(), b); }
    static Value natural(Natural n) {
        if (n < 0) throw UsageError("natural values are non-negative");
        return Value(Semiring::natural(), std::move(n));
    }
    static Value tropical(Cost c) { return Value(Semiring::tropical(), c); }

    /// Raw pair constructor; the components must match the descriptor's
    /// components. Does not apply the delta packing rule (see delta_pack).
    static Value pair(const Semiring& semiring, Value first, Value second);

    const Semiring& semiring() const noexcept { return semiring_; }

    bool as_bool() const { return get<bool>("bool"); }
    const Natural& as_natural() const { return get<Natural>("nat"); }
    Cost as_cost() const { return get<Cost>("trop"); }
    const Value& first() const;
    const Value& second() const;

    std::string to_string() const;

    friend bool operator==(const Value& a, const Value& b);

    friend std::ostream& operator<<(std::ostream& os, const Value& v) { return os << v.to_string(); }

private:
    using Payload = std::variant<bool, Natural, Cost, std::shared_ptr<const ValuePair>>;

    Value(Semiring semiring, Payload payload) : semiring_(std::move(semiring)), payload_(std::move(payload)) {}

    template <class T>
    const T& get(const char* what) const {
        if (const T* p = std::get_if<T>(&payload_)) return *p;
        throw UsageError(std::string("value ") + to_string() + " is not a " + what + " value");
    }

    Semiring semiring_;
    Payload payload_;
};

struct ValuePair {
    Value first;
    Value second;
};

inline Value Value::pair(const Semiring& semiring, Value first, Value second) {
    if (semiring.kind() != SemiringKind::delta && semiring.kind() != SemiringKind::product)
        throw UsageError("pair value for non-pair semiring " + semiring.to_string());
    if (!(first.semiring() == semiring.first()) || !(second.semiring() == semiring.second()))
        throw UsageError("pair components do not match " + semiring.to_string());
    return Value(semiring, std::make_shared<const ValuePair>(ValuePair{std::move(first), std::move(second)}));
}

inline const Value& Value::first() const { return get<std::shared_ptr<const ValuePair>>("pair")->first; }
inline const Value& Value::second() const { return get<std::shared_ptr<const ValuePair>>("pair")->second; }

inline std::string Value::to_string() const {
    return std::visit(
        [](const auto& p) -> std::string {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, bool>) return p ? "T" : "F";
            else if constexpr (std::is_same_v<T, Natural>) return p.str();
            else if constexpr (std::is_same_v<T, Cost>) return p.to_string();
            else return "(" + p->first.to_string() + "," + p->second.to_string() + ")";
        },
        payload_);
}

inline bool operator==(const Value& a, const Value& b) {
    if (!(a.semiring_ == b.semiring_) || a.payload_.index() != b.payload_.index()) return false;
    return std::visit(
        [&](const auto& p) -> bool {
            using T = std::decay_t<decltype(p)>;
            const auto& q = std::get<T>(b.payload_);
            if constexpr (std::is_same_v<T, std::shared_ptr<const ValuePair>>)
                return p == q || (p->first == q->first && p->second == q->second);
            else return p == q;
        },
        a.payload_);
}

// ---------------------------------------------------------------------------
// Semiring operations

inline Value zero(const Semiring& s);
inline Value one(const Semiring& s);
inline Value add(const Value& a, const Value& b);
inline Value mul(const Value& a, const Value& b);
inline bool is_regular(const Value& d);
inline Value delta_pack(const Semiring& delta, const Value& d, const Value& a);
inline std::strong_ordering dioid_compare(const Value& d1, const Value& d2);

inline Value zero(const Semiring& s) {
    switch (s.kind()) {
        case SemiringKind::boolean: return Value::boolean(false);
        case SemiringKind::natural: return Value::natural(0);
        case SemiringKind::tropical: return Value::tropical(Cost::infinity());
        default: return Value::pair(s, zero(s.first()), zero(s.second()));
    }
}

inline Value one(const Semiring& s) {
    switch (s.kind()) {
        case SemiringKind::boolean: return Value::boolean(true);
        case SemiringKind::natural: return Value::natural(1);
        case SemiringKind::tropical: return Value::tropical(Cost(0));
        case SemiringKind::delta: return delta_pack(s, one(s.first()), one(s.second()));
        default: return Value::pair(s, one(s.first()), one(s.second()));
    }
}

namespace detail {
inline void require_same(const Value& a, const Value& b, const char* op) {
    if (!(a.semiring() == b.semiring()))
        throw UsageError(std::string(op) + ": descriptor mismatch " + a.semiring().to_string() + " vs " +
                         b.semiring().to_string());
}
inline void require_dioid(const Semiring& s, const char* op) {
    if (!s.is_dioid()) throw UsageError(std::string(op) + ": " + s.to_string() + " is not a dioid");
}
}  // namespace detail

inline Value add(const Value& a, const Value& b) {
    detail::require_same(a, b, "add");
    const Semiring& s = a.semiring();
    switch (s.kind()) {
        case SemiringKind::boolean: return Value::boolean(a.as_bool() || b.as_bool());
        case SemiringKind::natural: return Value::natural(a.as_natural() + b.as_natural());
        case SemiringKind::tropical: return Value::tropical(std::min(a.as_cost(), b.as_cost()));
        case SemiringKind::delta: {
            const auto order = dioid_compare(a.first(), b.first());
            if (order < 0) return a;
            if (order > 0) return b;
            return delta_pack(s, a.first(), add(a.second(), b.second()));
        }
        case SemiringKind::product:
            return Value::pair(s, add(a.first(), b.first()), add(a.second(), b.second()));
    }
    return a;
}

inline Value mul(const Value& a, const Value& b) {
    detail::require_same(a, b, "mul");
    const Semiring& s = a.semiring();
    switch (s.kind()) {
        case SemiringKind::boolean: return Value::boolean(a.as_bool() && b.as_bool());
        case SemiringKind::natural: return Value::natural(a.as_natural() * b.as_natural());
        case SemiringKind::tropical: return Value::tropical(checked_add(a.as_cost(), b.as_cost()));
        case SemiringKind::delta: return delta_pack(s, mul(a.first(), b.first()), mul(a.second(), b.second()));
        case SemiringKind::product:
            return Value::pair(s, mul(a.first(), b.first()), mul(a.second(), b.second()));
    }
    return a;
}

/// Multiplicative regularity in a dioid, by closed-form rule:
/// bool: T; trop: finite; delta: both components regular.
inline bool is_regular(const Value& d) {
    const Semiring& s = d.semiring();
    detail::require_dioid(s, "is_regular");
    switch (s.kind()) {
        case SemiringKind::boolean: return d.as_bool();
        case SemiringKind::tropical: return d.as_cost().is_finite();
        default: return is_regular(d.first()) && is_regular(d.second());
    }
}

inline Value delta_pack(const Semiring& delta, const Value& d, const Value& a) {
    if (delta.kind() != SemiringKind::delta) throw UsageError("delta_pack into " + delta.to_string());
    if (is_regular(d)) return Value::pair(delta, d, a);
    return Value::pair(delta, d, zero(delta.second()));
}

/// Total order of a dioid: less means "better" (smaller cost).
inline std::strong_ordering dioid_compare(const Value& d1, const Value& d2) {
    detail::require_same(d1, d2, "dioid_compare");
    const Semiring& s = d1.semiring();
    detail::require_dioid(s, "dioid_compare");
    switch (s.kind()) {
        case SemiringKind::boolean:
            // T is the minimum.
            return static_cast<int>(!d1.as_bool()) <=> static_cast<int>(!d2.as_bool());
        case SemiringKind::tropical: return d1.as_cost() <=> d2.as_cost();
        default: {
            const auto head = dioid_compare(d1.first(), d2.first());
            if (head != 0) return head;
            return dioid_compare(d1.second(), d2.second());
        }
    }
}

struct DioidOrderWitness {
    Value left;
    Value right;
    std::strong_ordering relation;
};

inline DioidOrderWitness compare_witness(const Value& left, const Value& right) {
    return {left, right, dioid_compare(left, right)};
}

// ---------------------------------------------------------------------------
// Text syntax
//
//   descriptor: bool | nat | trop | delta(<dioid>,<semiring>) | prod(<semiring>,<semiring>)
//   value:      T | F | <decimal> | inf | (<value>,<value>)

namespace detail {

class LiteralReader {
public:
    explicit LiteralReader(std::string_view text) : text_(text) {}

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool at_end() {
        skip_space();
        return pos_ >= text_.size();
    }
    char peek() {
        skip_space();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }
    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }
    std::string word() {
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '-'))
            ++pos_;
        if (start == pos_) fail("expected a word or number");
        return std::string(text_.substr(start, pos_ - start));
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(what + " in '" + std::string(text_) + "'", 1, pos_ + 1);
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

inline Semiring read_semiring(LiteralReader& in) {
    const std::string w = in.word();
    if (w == "bool") return Semiring::boolean();
    if (w == "nat") return Semiring::natural();
    if (w == "trop") return Semiring::tropical();
    if (w == "delta" || w == "prod") {
        in.expect('(');
        Semiring a = read_semiring(in);
        in.expect(',');
        Semiring b = read_semiring(in);
        in.expect(')');
        if (w == "prod") return Semiring::product(a, b);
        if (!a.is_dioid()) in.fail("first argument of delta must be a dioid");
        return Semiring::delta(a, b);
    }
    in.fail("unknown semiring '" + w + "'");
}

inline Value read_value(LiteralReader& in, const Semiring& s) {
    switch (s.kind()) {
        case SemiringKind::boolean: {
            const std::string w = in.word();
            if (w == "T") return Value::boolean(true);
            if (w == "F") return Value::boolean(false);
            in.fail("expected T or F");
        }
        case SemiringKind::natural: {
            const std::string w = in.word();
            for (char c : w)
                if (!std::isdigit(static_cast<unsigned char>(c))) in.fail("expected a natural number");
            return Value::natural(Natural(w));
        }
        case SemiringKind::tropical: {
            const std::string w = in.word();
            if (w == "inf") return Value::tropical(Cost::infinity());
            std::size_t used = 0;
            long long v = 0;
            try {
                v = std::stoll(w, &used);
            } catch (const std::exception&) {
                in.fail("expected an integer cost or inf");
            }
            if (used != w.size()) in.fail("expected an integer cost or inf");
            return Value::tropical(Cost(v));
        }
        default: {
            in.expect('(');
            Value a = read_value(in, s.first());
            in.expect(',');
            Value b = read_value(in, s.second());
            in.expect(')');
            if (s.kind() == SemiringKind::delta && !is_regular(a) && !(b == zero(s.second())))
                in.fail("delta value with non-regular cost must carry zero");
            return Value::pair(s, std::move(a), std::move(b));
        }
    }
}

}  // namespace detail

inline Semiring parse_semiring(std::string_view text) {
    detail::LiteralReader in(text);
    Semiring s = detail::read_semiring(in);
    if (!in.at_end()) in.fail("trailing characters");
    return s;
}

inline Value parse_value(std::string_view text, const Semiring& s) {
    detail::LiteralReader in(text);
    Value v = detail::read_value(in, s);
    if (!in.at_end()) in.fail("trailing characters");
    return v;
}

}  // namespace semidp
