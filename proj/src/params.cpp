#include "nsdyn/params.hpp"

#include "nsdyn/error.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <numeric>
#include <sstream>

namespace nsdyn {

std::string_view to_string(Provenance p) noexcept {
    switch (p) {
        case Provenance::published:
            return "published";
        case Provenance::default_calibrated:
            return "default-calibrated";
        case Provenance::user:
            return "user";
    }
    return "published";
}

Provenance provenance_from_string(std::string_view s) {
    if (s == "published") return Provenance::published;
    if (s == "default-calibrated") return Provenance::default_calibrated;
    if (s == "user") return Provenance::user;
    throw ConfigError("unknown provenance '" + std::string(s) + "'");
}

ParamTable::ParamTable(std::vector<ParamEntry> entries) : entries_(std::move(entries)) {}

bool ParamTable::contains(std::string_view key) const noexcept {
    return std::any_of(entries_.begin(), entries_.end(), [&](const ParamEntry& e) { return e.key == key; });
}

const ParamEntry& ParamTable::entry(std::string_view key) const {
    auto it = std::find_if(entries_.begin(), entries_.end(), [&](const ParamEntry& e) { return e.key == key; });
    if (it == entries_.end()) {
        throw ConfigError("unknown parameter '" + std::string(key) + "'");
    }
    return *it;
}

double ParamTable::get(std::string_view key) const { return entry(key).value; }

void ParamTable::set(std::string_view key, double value, Provenance provenance) {
    auto it = std::find_if(entries_.begin(), entries_.end(), [&](const ParamEntry& e) { return e.key == key; });
    if (it == entries_.end()) {
        std::ostringstream msg;
        msg << "unknown parameter '" << key << "'";
        if (auto hint = suggest(key)) {
            msg << "; did you mean " << *hint << "?";
        }
        throw ConfigError(msg.str());
    }
    it->value = value;
    it->provenance = provenance;
}

std::optional<std::string> ParamTable::suggest(std::string_view unknown) const {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    const ParamEntry* best_entry = nullptr;
    const std::size_t budget = std::max<std::size_t>(2, unknown.size() / 3);

    auto consider = [&](std::string_view word, const ParamEntry& e) {
        const std::size_t d = edit_distance(unknown, word);
        if (d <= budget && d < best) {
            best = d;
            best_entry = &e;
        }
    };

    for (const auto& e : entries_) {
        consider(e.key, e);
        std::string word;
        for (char c : e.description + " ") {
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
                word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
            } else if (!word.empty()) {
                consider(word, e);
                word.clear();
            }
        }
    }
    if (best_entry == nullptr) {
        return std::nullopt;
    }
    return "'" + best_entry->key + "' (" + best_entry->description + ")";
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
    std::vector<std::size_t> prev(b.size() + 1);
    std::vector<std::size_t> cur(b.size() + 1);
    std::iota(prev.begin(), prev.end(), std::size_t{0});
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::optional<std::string> closest_match(std::string_view word, std::span<const std::string> candidates) {
    const std::size_t budget = std::max<std::size_t>(2, word.size() / 3);
    std::size_t best = std::numeric_limits<std::size_t>::max();
    std::optional<std::string> out;
    for (const auto& c : candidates) {
        const std::size_t d = edit_distance(word, c);
        if (d <= budget && d < best) {
            best = d;
            out = c;
        }
    }
    return out;
}

}  // namespace nsdyn
