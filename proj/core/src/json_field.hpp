#ifndef TEXTILE_JSON_FIELD_HPP
#define TEXTILE_JSON_FIELD_HPP

#include <string>

#include <json.hpp>

#include "textile/error.hpp"
#include "textile/geometry.hpp"

namespace textile::detail {

using nlohmann::json;

// Field access that reports the full field path on failure.
class Field {
public:
    Field(const json& j, const std::string& source, std::string path)
        : j_(j), source_(source), path_(std::move(path)) {}

    Field operator[](const char* key) const {
        const std::string p = path_.empty() ? key : path_ + "." + key;
        if (!j_.is_object() || !j_.contains(key)) throw ParseError(source_, p, "missing");
        return Field(j_.at(key), source_, p);
    }
    Field item(std::size_t i) const {
        const std::string p = path_ + "[" + std::to_string(i) + "]";
        if (!j_.is_array() || i >= j_.size()) throw ParseError(source_, p, "missing");
        return Field(j_.at(i), source_, p);
    }
    bool has(const char* key) const { return j_.is_object() && j_.contains(key); }
    bool is_null() const { return j_.is_null(); }
    const json& raw() const { return j_; }
    const std::string& path() const { return path_; }

    // Every key must appear in `allowed`.
    template <typename Range>
    void only(const Range& allowed) const {
        if (!j_.is_object()) fail("expected an object");
        for (const auto& [key, value] : j_.items()) {
            bool known = false;
            for (const auto& a : allowed) known = known || key == a;
            if (!known) throw ParseError(source_, path_.empty() ? key : path_ + "." + key, "unknown key");
        }
    }

    std::size_t size() const {
        if (!j_.is_array()) fail("expected an array");
        return j_.size();
    }
    double number() const {
        if (!j_.is_number()) fail("expected a number");
        return j_.get<double>();
    }
    std::int64_t integer() const {
        if (!j_.is_number_integer()) fail("expected an integer");
        return j_.get<std::int64_t>();
    }
    std::uint64_t unsigned_integer() const {
        if (!j_.is_number_unsigned() && !(j_.is_number_integer() && j_.get<std::int64_t>() >= 0)) {
            fail("expected a non-negative integer");
        }
        return j_.get<std::uint64_t>();
    }
    bool boolean() const {
        if (!j_.is_boolean()) fail("expected a boolean");
        return j_.get<bool>();
    }
    std::string string() const {
        if (!j_.is_string()) fail("expected a string");
        return j_.get<std::string>();
    }
    Vec3 vec3() const {
        if (size() != 3) fail("expected 3 numbers");
        return {item(0).number(), item(1).number(), item(2).number()};
    }
    Vec2 vec2() const {
        if (size() != 2) fail("expected 2 numbers");
        return {item(0).number(), item(1).number()};
    }
    template <typename F>
    auto convert(F&& f) const {
        try {
            return f();
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            fail(e.what());
        }
    }
    [[noreturn]] void fail(const std::string& detail) const { throw ParseError(source_, path_, detail); }

private:
    const json& j_;
    const std::string& source_;
    std::string path_;
};

inline json parse_document(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(source, "<document>", e.what());
    }
}

}  // namespace textile::detail

#endif  // TEXTILE_JSON_FIELD_HPP
