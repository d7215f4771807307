#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "emopipe/detail/utf8.hpp"
#include "emopipe/textnorm.hpp"
#include "test_support.hpp"

using namespace emopipe;

TEST_CASE("normalize_text lowercases and collapses whitespace", "[textnorm]") {
    CHECK(normalize_text("Kotu Ta Yi Hukunci") == "kotu ta yi hukunci");
    CHECK(normalize_text("  leading and trailing  ") == "leading and trailing");
    CHECK(normalize_text("tabs\tand\r\nnewlines") == "tabs and newlines");
    CHECK(normalize_text("") == "");
    CHECK(normalize_text("   \t\n  ") == "");
}

TEST_CASE("hooked Hausa letters lowercase correctly", "[textnorm]") {
    CHECK(normalize_text("\xc6\x81" "ARAWO") == "\xc9\x93" "arawo");     // Ɓ -> ɓ
    CHECK(normalize_text("\xc6\x8a" "AN ADAM") == "\xc9\x97" "an adam"); // Ɗ -> ɗ
    CHECK(normalize_text("\xc6\x98" "ASA") == "\xc6\x99" "asa");         // Ƙ -> ƙ
    CHECK(detail::simple_lowercase(U'Ɓ') == U'ɓ');
    CHECK(detail::simple_lowercase(U'Ɗ') == U'ɗ');
    CHECK(detail::simple_lowercase(U'Ƙ') == U'ƙ');
}

TEST_CASE("simple case mapping is unconditional and 1:1", "[textnorm]") {
    CHECK(detail::simple_lowercase(U'A') == U'a');
    CHECK(detail::simple_lowercase(U'z') == U'z');
    CHECK(detail::simple_lowercase(U'İ') == U'i');      // dotted capital I
    CHECK(detail::simple_lowercase(U'Σ') == U'σ'); // sigma, no final-form context
    CHECK(detail::simple_lowercase(U'0') == U'0');
    CHECK(detail::simple_lowercase(U'ɓ') == U'ɓ'); // already lowercase
}

TEST_CASE("unicode spaces separate words like ASCII space", "[textnorm]") {
    CHECK(detail::is_unicode_space(U' '));
    CHECK(detail::is_unicode_space(U'\t'));
    CHECK(detail::is_unicode_space(U' '));
    CHECK(detail::is_unicode_space(U' '));
    CHECK(detail::is_unicode_space(U'　'));
    CHECK_FALSE(detail::is_unicode_space(U'a'));
    CHECK_FALSE(detail::is_unicode_space(U'Ȁ'));

    CHECK(normalize_text("a\xc2\xa0\xc2\xa0" "b") == "a b");          // NBSP run
    CHECK(normalize_text("a\xe2\x80\x83" "b \xe3\x80\x80" "c") == "a b c");
}

TEST_CASE("normalize_text rejects malformed UTF-8", "[textnorm]") {
    CHECK_THROWS_AS(normalize_text("ok \xff\xfe"), std::invalid_argument);
    CHECK_THROWS_AS(normalize_text("trunc \xc6"), std::invalid_argument);
    CHECK_THROWS_AS(normalize_text("overlong \xc0\xaf"), std::invalid_argument);
}

namespace {

std::string random_raw_text(testsup::TestRng& rng) {
    static const std::vector<std::string> whitespace = {
        " ", "  ", "\t", "\r\n", "\n", "\xc2\xa0", "\xe2\x80\x83", " \t ",
    };
    static const std::vector<std::string> uppercase_extras = {
        "\xc6\x81", "\xc6\x8a", "\xc6\x98", "\xc3\x84", "\xce\xa3",
    };
    std::string out;
    const std::size_t words = 1 + rng.below(12);
    if (rng.chance(30)) out += rng.pick(whitespace);
    for (std::size_t w = 0; w < words; ++w) {
        if (w > 0) out += rng.pick(whitespace);
        std::string word = rng.pick(testsup::hausa_words());
        if (rng.chance(40)) {
            for (char& c : word)
                if (c >= 'a' && c <= 'z' && rng.chance(50)) c = static_cast<char>(c - 32);
        }
        if (rng.chance(15)) word += rng.pick(uppercase_extras);
        out += word;
    }
    if (rng.chance(30)) out += rng.pick(whitespace);
    return out;
}

}  // namespace

TEST_CASE("normalization postconditions hold on generated text", "[textnorm][property]") {
    testsup::TestRng rng(20250814);
    for (int iter = 0; iter < 500; ++iter) {
        const std::string raw = random_raw_text(rng);
        const std::string norm = normalize_text(raw);

        INFO("raw: " << raw);
        CHECK(normalize_text(norm) == norm);
        CHECK(detail::is_valid_utf8(norm));
        if (!norm.empty()) {
            CHECK(norm.front() != ' ');
            CHECK(norm.back() != ' ');
        }
        CHECK(norm.find("  ") == std::string::npos);

        std::size_t pos = 0;
        while (pos < norm.size()) {
            const char32_t cp = detail::decode_utf8(norm, pos);
            CHECK(detail::simple_lowercase(cp) == cp);
            if (detail::is_unicode_space(cp)) CHECK(cp == U' ');
        }
    }
}

TEST_CASE("preprocess_dataset rewrites every text and keeps labels", "[textnorm]") {
    Dataset in;
    in.split_name = "train";
    in.labeled = true;
    in.samples.push_back({"a", "  HELLO  World ", LabelVector::from_bits({1, 0, 0, 0, 0, 0})});
    in.samples.push_back({"b", "\xc6\x98" "arfi", LabelVector::from_bits({0, 0, 0, 1, 0, 0})});

    const Dataset out = preprocess_dataset(in);
    REQUIRE(out.samples.size() == 2);
    CHECK(out.samples[0].text == "hello world");
    CHECK(out.samples[1].text == "\xc6\x99" "arfi");
    CHECK(out.samples[0].id == "a");
    CHECK(out.samples[0].labels == in.samples[0].labels);
    CHECK(out.labeled);
}
