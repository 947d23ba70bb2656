#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace torusglue {

/// Signed arbitrary-precision integer, sign-magnitude over base 10^9 limbs.
/// Supports exactly what the series engine needs: +, -, *, comparison and
/// decimal round-trips. Division is never required.
class BigInt {
public:
    BigInt() = default;

    BigInt(std::int64_t v) {  // NOLINT: implicit by design
        negative_ = v < 0;
        std::uint64_t m = negative_ ? (~static_cast<std::uint64_t>(v) + 1) : static_cast<std::uint64_t>(v);
        while (m != 0) {
            limbs_.push_back(static_cast<std::uint32_t>(m % kBase));
            m /= kBase;
        }
    }

    static BigInt from_string(const std::string& s) {
        if (s.empty()) throw std::invalid_argument("BigInt: empty string");
        std::size_t pos = 0;
        bool neg = false;
        if (s[pos] == '+' || s[pos] == '-') {
            neg = s[pos] == '-';
            ++pos;
        }
        if (pos == s.size()) throw std::invalid_argument("BigInt: no digits");
        BigInt out;
        for (; pos < s.size(); ++pos) {
            if (s[pos] < '0' || s[pos] > '9')
                throw std::invalid_argument("BigInt: bad digit in '" + s + "'");
            out.mul_small(10);
            out.add_small(static_cast<std::uint32_t>(s[pos] - '0'));
        }
        out.negative_ = neg && !out.limbs_.empty();
        return out;
    }

    [[nodiscard]] bool is_zero() const { return limbs_.empty(); }
    [[nodiscard]] int sign() const { return limbs_.empty() ? 0 : (negative_ ? -1 : 1); }

    [[nodiscard]] bool fits_int64() const {
        static const BigInt lo(std::int64_t(INT64_MIN)), hi(std::int64_t(INT64_MAX));
        return !(*this < lo) && !(hi < *this);
    }

    [[nodiscard]] std::int64_t to_int64() const {
        std::int64_t v = 0;
        for (std::size_t i = limbs_.size(); i-- > 0;) v = v * kBase + limbs_[i];
        return negative_ ? -v : v;
    }

    [[nodiscard]] std::string to_string() const {
        if (limbs_.empty()) return "0";
        std::string s = negative_ ? "-" : "";
        s += std::to_string(limbs_.back());
        char buf[10];
        for (std::size_t i = limbs_.size() - 1; i-- > 0;) {
            std::snprintf(buf, sizeof buf, "%09u", limbs_[i]);
            s += buf;
        }
        return s;
    }

    friend BigInt operator-(const BigInt& a) {
        BigInt r = a;
        if (!r.limbs_.empty()) r.negative_ = !r.negative_;
        return r;
    }

    friend BigInt operator+(const BigInt& a, const BigInt& b) {
        if (a.negative_ == b.negative_) {
            BigInt r = add_mag(a, b);
            r.negative_ = a.negative_ && !r.limbs_.empty();
            return r;
        }
        int c = cmp_mag(a, b);
        if (c == 0) return BigInt{};
        BigInt r = c > 0 ? sub_mag(a, b) : sub_mag(b, a);
        r.negative_ = (c > 0 ? a.negative_ : b.negative_) && !r.limbs_.empty();
        return r;
    }

    friend BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

    friend BigInt operator*(const BigInt& a, const BigInt& b) {
        if (a.limbs_.empty() || b.limbs_.empty()) return BigInt{};
        BigInt r;
        r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
        for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
            std::uint64_t carry = 0;
            for (std::size_t j = 0; j < b.limbs_.size(); ++j) {
                std::uint64_t cur = r.limbs_[i + j] +
                                    static_cast<std::uint64_t>(a.limbs_[i]) * b.limbs_[j] + carry;
                r.limbs_[i + j] = static_cast<std::uint32_t>(cur % kBase);
                carry = cur / kBase;
            }
            std::size_t k = i + b.limbs_.size();
            while (carry != 0) {
                std::uint64_t cur = r.limbs_[k] + carry;
                r.limbs_[k] = static_cast<std::uint32_t>(cur % kBase);
                carry = cur / kBase;
                ++k;
            }
        }
        r.trim();
        r.negative_ = (a.negative_ != b.negative_) && !r.limbs_.empty();
        return r;
    }

    BigInt& operator+=(const BigInt& o) { return *this = *this + o; }
    BigInt& operator-=(const BigInt& o) { return *this = *this - o; }
    BigInt& operator*=(const BigInt& o) { return *this = *this * o; }

    friend bool operator==(const BigInt& a, const BigInt& b) {
        return a.negative_ == b.negative_ && a.limbs_ == b.limbs_;
    }
    friend bool operator!=(const BigInt& a, const BigInt& b) { return !(a == b); }

    friend bool operator<(const BigInt& a, const BigInt& b) {
        if (a.negative_ != b.negative_) return a.negative_;
        int c = cmp_mag(a, b);
        return a.negative_ ? c > 0 : c < 0;
    }

private:
    static constexpr std::uint32_t kBase = 1000000000u;

    void trim() {
        while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
        if (limbs_.empty()) negative_ = false;
    }

    void mul_small(std::uint32_t m) {
        std::uint64_t carry = 0;
        for (auto& l : limbs_) {
            std::uint64_t cur = static_cast<std::uint64_t>(l) * m + carry;
            l = static_cast<std::uint32_t>(cur % kBase);
            carry = cur / kBase;
        }
        while (carry != 0) {
            limbs_.push_back(static_cast<std::uint32_t>(carry % kBase));
            carry /= kBase;
        }
    }

    void add_small(std::uint32_t v) {
        std::uint64_t carry = v;
        for (std::size_t i = 0; carry != 0 && i < limbs_.size(); ++i) {
            std::uint64_t cur = limbs_[i] + carry;
            limbs_[i] = static_cast<std::uint32_t>(cur % kBase);
            carry = cur / kBase;
        }
        if (carry != 0) limbs_.push_back(static_cast<std::uint32_t>(carry));
    }

    static int cmp_mag(const BigInt& a, const BigInt& b) {
        if (a.limbs_.size() != b.limbs_.size())
            return a.limbs_.size() < b.limbs_.size() ? -1 : 1;
        for (std::size_t i = a.limbs_.size(); i-- > 0;)
            if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] < b.limbs_[i] ? -1 : 1;
        return 0;
    }

    static BigInt add_mag(const BigInt& a, const BigInt& b) {
        BigInt r;
        const auto& x = a.limbs_.size() >= b.limbs_.size() ? a.limbs_ : b.limbs_;
        const auto& y = a.limbs_.size() >= b.limbs_.size() ? b.limbs_ : a.limbs_;
        r.limbs_ = x;
        std::uint64_t carry = 0;
        for (std::size_t i = 0; i < r.limbs_.size(); ++i) {
            std::uint64_t cur = r.limbs_[i] + carry + (i < y.size() ? y[i] : 0);
            r.limbs_[i] = static_cast<std::uint32_t>(cur % kBase);
            carry = cur / kBase;
        }
        if (carry != 0) r.limbs_.push_back(static_cast<std::uint32_t>(carry));
        return r;
    }

    // requires |a| >= |b|
    static BigInt sub_mag(const BigInt& a, const BigInt& b) {
        BigInt r;
        r.limbs_ = a.limbs_;
        std::int64_t borrow = 0;
        for (std::size_t i = 0; i < r.limbs_.size(); ++i) {
            std::int64_t cur = static_cast<std::int64_t>(r.limbs_[i]) - borrow -
                               (i < b.limbs_.size() ? b.limbs_[i] : 0);
            borrow = cur < 0 ? 1 : 0;
            if (cur < 0) cur += kBase;
            r.limbs_[i] = static_cast<std::uint32_t>(cur);
        }
        r.trim();
        return r;
    }

    std::vector<std::uint32_t> limbs_;
    bool negative_ = false;
};

}  // namespace torusglue
