#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace emopipe {

/// The six task emotions, in canonical column order. The ordinals double as
/// classifier class ids and as label-column positions, so the order is fixed
/// for the life of the format.
enum class Emotion : int {
    anger = 0,
    disgust = 1,
    fear = 2,
    joy = 3,
    sadness = 4,
    surprise = 5,
};

inline constexpr std::size_t kNumEmotions = 6;

inline constexpr std::array<std::string_view, kNumEmotions> kEmotionNames = {
    "anger", "disgust", "fear", "joy", "sadness", "surprise"};

inline constexpr std::string_view to_string(Emotion e) {
    return kEmotionNames[static_cast<std::size_t>(e)];
}

inline Emotion emotion_from_ordinal(int ordinal) {
    if (ordinal < 0 || ordinal >= static_cast<int>(kNumEmotions))
        throw std::out_of_range("emotion ordinal out of range: " + std::to_string(ordinal));
    return static_cast<Emotion>(ordinal);
}

/// Case-sensitive lookup of an emotion by its canonical name.
inline std::optional<Emotion> emotion_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kNumEmotions; ++i) {
        if (kEmotionNames[i] == name) return static_cast<Emotion>(i);
    }
    return std::nullopt;
}

/// One-hot / multi-hot label row: one binary flag per emotion, indexed by
/// ordinal. Serializes as exactly six 0/1 CSV cells in canonical order.
class LabelVector {
public:
    LabelVector() = default;

    explicit LabelVector(const std::array<bool, kNumEmotions>& bits) : bits_(bits) {}

    static LabelVector from_bits(std::initializer_list<int> bits) {
        if (bits.size() != kNumEmotions)
            throw std::invalid_argument("LabelVector needs exactly 6 bits");
        LabelVector v;
        std::size_t i = 0;
        for (int b : bits) {
            if (b != 0 && b != 1) throw std::invalid_argument("LabelVector bits must be 0 or 1");
            v.bits_[i++] = (b == 1);
        }
        return v;
    }

    bool test(Emotion e) const { return bits_[static_cast<std::size_t>(e)]; }
    bool test(std::size_t ordinal) const { return bits_.at(ordinal); }

    void set(Emotion e, bool value = true) { bits_[static_cast<std::size_t>(e)] = value; }

    std::size_t count() const {
        std::size_t n = 0;
        for (bool b : bits_) n += b ? 1 : 0;
        return n;
    }

    bool any() const { return count() > 0; }
    bool none() const { return count() == 0; }

    bool operator==(const LabelVector&) const = default;

    /// Six comma-joined 0/1 cells in canonical order.
    std::string to_csv_cells() const {
        std::string out;
        for (std::size_t i = 0; i < kNumEmotions; ++i) {
            if (i > 0) out.push_back(',');
            out.push_back(bits_[i] ? '1' : '0');
        }
        return out;
    }

private:
    std::array<bool, kNumEmotions> bits_{};
};

}  // namespace emopipe
