#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nsdyn {

/// Where a resolved parameter value came from.
enum class Provenance { published, default_calibrated, user };

[[nodiscard]] std::string_view to_string(Provenance p) noexcept;
[[nodiscard]] Provenance provenance_from_string(std::string_view s);

struct ParamEntry {
    std::string key;
    double value = 0.0;
    Provenance provenance = Provenance::published;
    std::string description;
    std::string unit;

    friend bool operator==(const ParamEntry&, const ParamEntry&) = default;
};

/// Ordered, named parameter record. Models are built from a table so that
/// overrides, provenance and the config echo all go through one place.
class ParamTable {
public:
    ParamTable() = default;
    explicit ParamTable(std::vector<ParamEntry> entries);

    [[nodiscard]] bool contains(std::string_view key) const noexcept;
    [[nodiscard]] double get(std::string_view key) const;
    [[nodiscard]] const ParamEntry& entry(std::string_view key) const;

    /// Overrides an existing key. Unknown keys raise ConfigError carrying a
    /// "did you mean" hint.
    void set(std::string_view key, double value, Provenance provenance = Provenance::user);

    [[nodiscard]] const std::vector<ParamEntry>& entries() const noexcept { return entries_; }

    /// Closest known key to `unknown`, matched against key names and the words
    /// of each description.
    [[nodiscard]] std::optional<std::string> suggest(std::string_view unknown) const;

    friend bool operator==(const ParamTable&, const ParamTable&) = default;

private:
    std::vector<ParamEntry> entries_;
};

[[nodiscard]] std::size_t edit_distance(std::string_view a, std::string_view b);

/// Closest candidate within a length-scaled edit-distance budget.
[[nodiscard]] std::optional<std::string> closest_match(std::string_view word,
                                                       std::span<const std::string> candidates);

}  // namespace nsdyn
