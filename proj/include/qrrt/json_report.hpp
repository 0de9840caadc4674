#pragma once

// Machine-readable verification reports.  Schema (fixed key order):
//   { "version": 1,
//     "reports": [ { "name": ..., "status": "pass"|"fail"|"ambiguous",
//                    "q_order": N, "a_order": N|null,
//                    "first_divergence": { "location": ..., "a_exp": N,
//                       "q_exp": N, "lhs_coeff": Z, "rhs_coeff": Z },   (fail only)
//                    "elapsed_ms": N } ] }
// Integers are emitted unquoted; coefficients may exceed 64 bits, which JSON
// numbers permit (the reader below parses them exactly).

#include <cctype>
#include <sstream>
#include <string>
#include <vector>

#include "qrrt/errors.hpp"
#include "qrrt/report.hpp"

namespace qrrt {

namespace detail {

inline void json_escape(std::ostream& os, const std::string& s) {
    os << '"';
    for (char c : s) {
        switch (c) {
            case '"': os << "\\\""; break;
            case '\\': os << "\\\\"; break;
            case '\n': os << "\\n"; break;
            case '\t': os << "\\t"; break;
            case '\r': os << "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    os << buf;
                } else {
                    os << c;
                }
        }
    }
    os << '"';
}

}  // namespace detail

inline std::string emit_json(const std::vector<VerificationReport>& reports) {
    std::ostringstream os;
    os << "{\"version\":1,\"reports\":[";
    bool first = true;
    for (const auto& r : reports) {
        if (!first) os << ',';
        first = false;
        os << "{\"name\":";
        detail::json_escape(os, r.target);
        os << ",\"status\":\"" << to_string(r.status) << "\"";
        os << ",\"q_order\":" << r.checked_q_order;
        os << ",\"a_order\":";
        if (r.checked_a_order)
            os << *r.checked_a_order;
        else
            os << "null";
        if (r.first_divergence) {
            const auto& d = *r.first_divergence;
            os << ",\"first_divergence\":{\"location\":";
            detail::json_escape(os, d.location);
            os << ",\"a_exp\":" << d.a_exp << ",\"q_exp\":" << d.q_exp
               << ",\"lhs_coeff\":" << d.lhs_coeff.get_str()
               << ",\"rhs_coeff\":" << d.rhs_coeff.get_str() << "}";
        }
        os << ",\"elapsed_ms\":" << r.elapsed_ms << "}";
    }
    os << "]}";
    return os.str();
}

namespace detail {

// Minimal JSON reader for the report schema above (exact big integers).
class JsonReader {
public:
    explicit JsonReader(const std::string& text) : text_(text) {}

    std::vector<VerificationReport> read_reports() {
        skip_ws();
        expect('{');
        std::vector<VerificationReport> reports;
        bool saw_version = false;
        bool first = true;
        while (true) {
            skip_ws();
            if (peek() == '}') {
                ++pos_;
                break;
            }
            if (!first) expect(',');
            first = false;
            skip_ws();
            std::string key = read_string();
            skip_ws();
            expect(':');
            skip_ws();
            if (key == "version") {
                if (read_integer() != "1") throw ValidationError("unsupported report version");
                saw_version = true;
            } else if (key == "reports") {
                reports = read_report_array();
            } else {
                throw ValidationError("unexpected key '" + key + "' in report document");
            }
        }
        if (!saw_version) throw ValidationError("report document has no version");
        skip_ws();
        if (pos_ != text_.size()) throw ValidationError("trailing content after report document");
        return reports;
    }

private:
    char peek() const {
        if (pos_ >= text_.size()) throw ValidationError("unexpected end of report document");
        return text_[pos_];
    }
    void expect(char c) {
        if (peek() != c)
            throw ValidationError(std::string("expected '") + c + "' in report document");
        ++pos_;
    }
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    std::string read_string() {
        expect('"');
        std::string s;
        while (true) {
            char c = peek();
            ++pos_;
            if (c == '"') return s;
            if (c == '\\') {
                char e = peek();
                ++pos_;
                switch (e) {
                    case '"': s += '"'; break;
                    case '\\': s += '\\'; break;
                    case '/': s += '/'; break;
                    case 'n': s += '\n'; break;
                    case 't': s += '\t'; break;
                    case 'r': s += '\r'; break;
                    case 'u': {
                        if (pos_ + 4 > text_.size())
                            throw ValidationError("bad \\u escape in report document");
                        int v = std::stoi(text_.substr(pos_, 4), nullptr, 16);
                        pos_ += 4;
                        if (v > 0x7f) throw ValidationError("non-ASCII \\u escape unsupported");
                        s += static_cast<char>(v);
                        break;
                    }
                    default:
                        throw ValidationError("bad escape in report document");
                }
            } else {
                s += c;
            }
        }
    }

    std::string read_integer() {
        std::string s;
        if (peek() == '-') {
            s += '-';
            ++pos_;
        }
        if (!std::isdigit(static_cast<unsigned char>(peek())))
            throw ValidationError("expected an integer in report document");
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            s += text_[pos_];
            ++pos_;
        }
        return s;
    }

    bool try_read_null() {
        if (text_.compare(pos_, 4, "null") == 0) {
            pos_ += 4;
            return true;
        }
        return false;
    }

    std::vector<VerificationReport> read_report_array() {
        expect('[');
        std::vector<VerificationReport> out;
        skip_ws();
        if (peek() == ']') {
            ++pos_;
            return out;
        }
        while (true) {
            skip_ws();
            out.push_back(read_report());
            skip_ws();
            if (peek() == ']') {
                ++pos_;
                return out;
            }
            expect(',');
        }
    }

    VerificationReport read_report() {
        expect('{');
        VerificationReport r;
        bool first = true;
        while (true) {
            skip_ws();
            if (peek() == '}') {
                ++pos_;
                break;
            }
            if (!first) expect(',');
            first = false;
            skip_ws();
            std::string key = read_string();
            skip_ws();
            expect(':');
            skip_ws();
            if (key == "name") {
                r.target = read_string();
            } else if (key == "status") {
                std::string s = read_string();
                if (s == "pass")
                    r.status = Status::Pass;
                else if (s == "fail")
                    r.status = Status::Fail;
                else if (s == "ambiguous")
                    r.status = Status::Ambiguous;
                else
                    throw ValidationError("unknown status '" + s + "'");
            } else if (key == "q_order") {
                r.checked_q_order = std::stoi(read_integer());
            } else if (key == "a_order") {
                if (!try_read_null()) r.checked_a_order = std::stoi(read_integer());
            } else if (key == "elapsed_ms") {
                r.elapsed_ms = std::stol(read_integer());
            } else if (key == "first_divergence") {
                r.first_divergence = read_divergence();
            } else {
                throw ValidationError("unexpected key '" + key + "' in report");
            }
        }
        return r;
    }

    FirstDivergence read_divergence() {
        expect('{');
        FirstDivergence d;
        bool first = true;
        while (true) {
            skip_ws();
            if (peek() == '}') {
                ++pos_;
                break;
            }
            if (!first) expect(',');
            first = false;
            skip_ws();
            std::string key = read_string();
            skip_ws();
            expect(':');
            skip_ws();
            if (key == "location")
                d.location = read_string();
            else if (key == "a_exp")
                d.a_exp = std::stoi(read_integer());
            else if (key == "q_exp")
                d.q_exp = std::stoi(read_integer());
            else if (key == "lhs_coeff")
                d.lhs_coeff = Int(read_integer());
            else if (key == "rhs_coeff")
                d.rhs_coeff = Int(read_integer());
            else
                throw ValidationError("unexpected key '" + key + "' in first_divergence");
        }
        return d;
    }

    const std::string& text_;
    size_t pos_ = 0;
};

}  // namespace detail

inline std::vector<VerificationReport> parse_json_reports(const std::string& text) {
    return detail::JsonReader(text).read_reports();
}

}  // namespace qrrt
