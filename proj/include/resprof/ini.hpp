// Copyright 2026 resprof contributors
// SPDX-License-Identifier: Apache-2.0
//
// Minimal INI reader for the two user-editable config files (delta rules
// and graph style). Sections, key = value pairs, # or ; comments. Order is
// preserved because rule evaluation order matters.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "resprof/error.hpp"
#include "resprof/text.hpp"

namespace resprof {

struct IniEntry {
    std::string key;
    std::string value;
};

struct IniSection {
    std::string name;
    std::vector<IniEntry> entries;

    const std::string* get(std::string_view key) const {
        for (const auto& e : entries)
            if (e.key == key) return &e.value;
        return nullptr;
    }
};

struct IniDocument {
    std::vector<IniSection> sections;

    const IniSection* find(std::string_view name) const {
        for (const auto& s : sections)
            if (s.name == name) return &s;
        return nullptr;
    }
};

inline IniDocument parse_ini(std::string_view doc) {
    IniDocument out;
    std::size_t lineno = 0;
    for (std::string_view raw : text::split_lines(doc)) {
        ++lineno;
        std::string_view line = text::trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3)
                throw ParseError("ini line " + std::to_string(lineno) + ": malformed section header '" +
                                 std::string(line) + "'");
            out.sections.push_back({std::string(text::trim(line.substr(1, line.size() - 2))), {}});
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("ini line " + std::to_string(lineno) + ": expected 'key = value', got '" +
                             std::string(line) + "'");
        if (out.sections.empty())
            throw ParseError("ini line " + std::to_string(lineno) + ": key outside any section");
        out.sections.back().entries.push_back({std::string(text::trim(line.substr(0, eq))),
                                               std::string(text::trim(line.substr(eq + 1)))});
    }
    return out;
}

} // namespace resprof
