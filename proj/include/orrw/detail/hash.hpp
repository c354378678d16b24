#pragma once

#include <cstdint>
#include <cstddef>
#include <utility>
#include <vector>

namespace orrw::detail {

// Finalizer of splitmix64; a strong 64-bit bit mixer.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

// Open-addressing set of 64-bit keys with linear probing.
// The key kEmpty (all ones) is reserved and must never be inserted;
// the key encodings used in this library cannot produce it.
class U64Set {
public:
    static constexpr std::uint64_t kEmpty = ~0ULL;

    U64Set() { rehash(16); }
    explicit U64Set(std::size_t expected) {
        std::size_t cap = 16;
        while (cap < expected * 2) cap <<= 1;
        rehash(cap);
    }

    bool contains(std::uint64_t key) const noexcept {
        std::size_t i = mix64(key) & mask_;
        while (true) {
            std::uint64_t s = slots_[i];
            if (s == key) return true;
            if (s == kEmpty) return false;
            i = (i + 1) & mask_;
        }
    }

    // Returns true if the key was newly inserted.
    bool insert(std::uint64_t key) {
        if ((size_ + 1) * 10 >= slots_.size() * 7) grow();
        std::size_t i = mix64(key) & mask_;
        while (true) {
            std::uint64_t s = slots_[i];
            if (s == key) return false;
            if (s == kEmpty) {
                slots_[i] = key;
                ++size_;
                return true;
            }
            i = (i + 1) & mask_;
        }
    }

    std::size_t size() const noexcept { return size_; }
    bool empty() const noexcept { return size_ == 0; }

    void reserve(std::size_t expected) {
        std::size_t cap = slots_.size();
        while (cap < expected * 2) cap <<= 1;
        if (cap != slots_.size()) rehash_move(cap);
    }

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (std::uint64_t s : slots_)
            if (s != kEmpty) fn(s);
    }

    std::vector<std::uint64_t> to_vector() const {
        std::vector<std::uint64_t> out;
        out.reserve(size_);
        for_each([&](std::uint64_t k) { out.push_back(k); });
        return out;
    }

private:
    void rehash(std::size_t cap) {
        slots_.assign(cap, kEmpty);
        mask_ = cap - 1;
        size_ = 0;
    }
    void grow() { rehash_move(slots_.size() * 2); }
    void rehash_move(std::size_t cap) {
        std::vector<std::uint64_t> old = std::move(slots_);
        rehash(cap);
        for (std::uint64_t s : old)
            if (s != kEmpty) insert(s);
    }

    std::vector<std::uint64_t> slots_;
    std::size_t mask_ = 0;
    std::size_t size_ = 0;
};

// Open-addressing map from 64-bit keys to trivially copyable values.
template <typename V>
class U64Map {
public:
    static constexpr std::uint64_t kEmpty = ~0ULL;

    U64Map() { rehash(16); }

    V* find(std::uint64_t key) noexcept {
        std::size_t i = mix64(key) & mask_;
        while (true) {
            std::uint64_t s = keys_[i];
            if (s == key) return &vals_[i];
            if (s == kEmpty) return nullptr;
            i = (i + 1) & mask_;
        }
    }
    const V* find(std::uint64_t key) const noexcept {
        return const_cast<U64Map*>(this)->find(key);
    }

    // Inserts value_if_absent when the key is new; returns (slot, inserted).
    std::pair<V*, bool> insert(std::uint64_t key, const V& value_if_absent) {
        if ((size_ + 1) * 10 >= keys_.size() * 7) grow();
        std::size_t i = mix64(key) & mask_;
        while (true) {
            std::uint64_t s = keys_[i];
            if (s == key) return {&vals_[i], false};
            if (s == kEmpty) {
                keys_[i] = key;
                vals_[i] = value_if_absent;
                ++size_;
                return {&vals_[i], true};
            }
            i = (i + 1) & mask_;
        }
    }

    std::size_t size() const noexcept { return size_; }

    void reserve(std::size_t expected) {
        std::size_t cap = keys_.size();
        while (cap < expected * 2) cap <<= 1;
        if (cap != keys_.size()) rehash_move(cap);
    }

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (std::size_t i = 0; i < keys_.size(); ++i)
            if (keys_[i] != kEmpty) fn(keys_[i], vals_[i]);
    }

private:
    void rehash(std::size_t cap) {
        keys_.assign(cap, kEmpty);
        vals_.assign(cap, V{});
        mask_ = cap - 1;
        size_ = 0;
    }
    void grow() { rehash_move(keys_.size() * 2); }
    void rehash_move(std::size_t cap) {
        std::vector<std::uint64_t> old_k = std::move(keys_);
        std::vector<V> old_v = std::move(vals_);
        rehash(cap);
        for (std::size_t i = 0; i < old_k.size(); ++i)
            if (old_k[i] != kEmpty) insert(old_k[i], old_v[i]);
    }

    std::vector<std::uint64_t> keys_;
    std::vector<V> vals_;
    std::size_t mask_ = 0;
    std::size_t size_ = 0;
};

} // namespace orrw::detail
