#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace snore {

inline constexpr int kSampleRate = 16000;
inline constexpr double kWindowSeconds = 10.0;
inline constexpr std::size_t kWindowSamples = 160000;

/// Ground-truth taxonomy. Order is significant: it is the tie-break and
/// report order everywhere.
enum class SoundClass { OsaSnore = 0, SimpleSnore = 1, Other = 2 };

inline constexpr std::array<SoundClass, 3> kAllClasses = {
    SoundClass::OsaSnore, SoundClass::SimpleSnore, SoundClass::Other};

std::string_view to_string(SoundClass c);
std::optional<SoundClass> parse_sound_class(std::string_view text);

}  // namespace snore
