#pragma once

#include <string>

#include <json.hpp>

namespace tokautoma::detail {

/// One top-level key per line; arrays of arrays or objects get one element per line.
/// Negative indent gives the compact single-line form.
inline std::string dump_rows(const nlohmann::json& doc, int indent)
{
    if (indent < 0 || !doc.is_object()) {
        return doc.dump();
    }
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    std::string out = "{";
    bool first_key = true;
    for (const auto& [key, value] : doc.items()) {
        out += first_key ? "\n" : ",\n";
        first_key = false;
        out += pad + nlohmann::json(key).dump() + ": ";
        const bool rows = value.is_array() && !value.empty() && (value.front().is_array() || value.front().is_object());
        if (!rows) {
            out += value.dump();
            continue;
        }
        out += "[";
        for (std::size_t i = 0; i < value.size(); ++i) {
            out += (i == 0 ? "\n" : ",\n") + pad + pad + value[i].dump();
        }
        out += "\n" + pad + "]";
    }
    out += "\n}";
    return out;
}

} // namespace tokautoma::detail
