#include "qn/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qn {

std::string format_g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<CsvCell>>& rows) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out += ',';
        out += header[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw std::invalid_argument("write_csv: row width does not match header");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i].text;
        }
        out += '\n';
    }
    write_text_file(path, out);
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) ensure_dir(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec && !std::filesystem::is_directory(dir))
        throw std::runtime_error("cannot create directory: " + dir.string());
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

nlohmann::json parse_toml_scalar(const std::string& raw) {
    const std::string v = trim(raw);
    if (v.empty()) throw std::runtime_error("toml: empty value");
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"')
            throw std::runtime_error("toml: unterminated string: " + v);
        return v.substr(1, v.size() - 2);
    }
    if (v == "true") return true;
    if (v == "false") return false;
    try {
        std::size_t used = 0;
        if (v.find_first_of(".eE") == std::string::npos) {
            const long long i = std::stoll(v, &used);
            if (used == v.size()) return i;
        }
        const double d = std::stod(v, &used);
        if (used == v.size()) return d;
    } catch (const std::exception&) {
    }
    throw std::runtime_error("toml: cannot parse value: " + v);
}

} // namespace

nlohmann::json parse_flat_toml(const std::string& text) {
    nlohmann::json out = nlohmann::json::object();
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // Strip comments outside quoted strings.
        bool quoted = false;
        std::string body;
        for (char ch : line) {
            if (ch == '"') quoted = !quoted;
            if (ch == '#' && !quoted) break;
            body += ch;
        }
        body = trim(body);
        if (body.empty()) continue;
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("toml: expected key = value on line " +
                                     std::to_string(lineno));
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty()) throw std::runtime_error("toml: empty key on line " + std::to_string(lineno));
        if (!value.empty() && value.front() == '[') {
            if (value.back() != ']')
                throw std::runtime_error("toml: unterminated array on line " +
                                         std::to_string(lineno));
            nlohmann::json arr = nlohmann::json::array();
            std::string inner = value.substr(1, value.size() - 2);
            std::string item;
            bool q = false;
            for (char ch : inner) {
                if (ch == '"') q = !q;
                if (ch == ',' && !q) {
                    if (!trim(item).empty()) arr.push_back(parse_toml_scalar(item));
                    item.clear();
                } else {
                    item += ch;
                }
            }
            if (!trim(item).empty()) arr.push_back(parse_toml_scalar(item));
            out[key] = std::move(arr);
        } else {
            out[key] = parse_toml_scalar(value);
        }
    }
    return out;
}

nlohmann::json parse_config_file(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    const std::string ext = path.extension().string();
    if (ext == ".json") return nlohmann::json::parse(text);
    if (ext == ".toml") return parse_flat_toml(text);
    throw std::runtime_error("unsupported config extension (want .json or .toml): " +
                             path.string());
}

} // namespace qn
