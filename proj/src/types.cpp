#include "roadwatch/types.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace roadwatch {

namespace {

constexpr std::array<std::string_view, kCategoryCount> kCategoryNames = {
    "car",        "truck",   "bus",     "trailer",           "van",
    "pedestrian", "motorcycle", "bicycle", "emergency_vehicle", "other",
};

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

std::string_view category_name(Category c) {
    return kCategoryNames[static_cast<std::size_t>(c)];
}

std::optional<Category> parse_category(std::string_view name) {
    std::string lowered = to_lower(name);
    // Accept space and dash variants of the two-word class.
    std::replace(lowered.begin(), lowered.end(), ' ', '_');
    std::replace(lowered.begin(), lowered.end(), '-', '_');
    for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
        if (lowered == kCategoryNames[i]) {
            return static_cast<Category>(i);
        }
    }
    return std::nullopt;
}

}  // namespace roadwatch
