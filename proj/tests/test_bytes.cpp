#include <doctest.h>

#include "meshchain/bytes.hpp"

using namespace meshchain;

TEST_CASE("integers serialize big-endian") {
    ByteWriter w;
    w.u32(0x01020304u);
    w.u64(0x0102030405060708ull);
    const Bytes& b = w.data();
    REQUIRE(b.size() == 12);
    CHECK(b[0] == 0x01);
    CHECK(b[3] == 0x04);
    CHECK(b[4] == 0x01);
    CHECK(b[11] == 0x08);
}

TEST_CASE("strings carry a 4-byte length prefix") {
    ByteWriter w;
    w.str("ab");
    const Bytes& b = w.data();
    REQUIRE(b.size() == 6);
    CHECK(b[0] == 0);
    CHECK(b[3] == 2);
    CHECK(b[4] == 'a');
    CHECK(b[5] == 'b');
}

TEST_CASE("writer and reader round-trip every field type") {
    ByteWriter w;
    w.u8(7);
    w.u32(123456u);
    w.u64(0xdeadbeefcafef00dull);
    w.i64(-42);
    w.f64(-1.5e300);
    w.str("hello");
    w.bytes(Bytes{1, 2, 3});
    Digest d{};
    d[0] = 0xaa;
    d[31] = 0xbb;
    w.digest(d);

    ByteReader r(w.data());
    CHECK(r.u8() == 7);
    CHECK(r.u32() == 123456u);
    CHECK(r.u64() == 0xdeadbeefcafef00dull);
    CHECK(r.i64() == -42);
    CHECK(r.f64() == -1.5e300);
    CHECK(r.str() == "hello");
    CHECK(r.bytes() == Bytes{1, 2, 3});
    CHECK(r.digest() == d);
    CHECK(r.done());
}

TEST_CASE("doubles round-trip by bit pattern") {
    for (double v : {0.0, -0.0, 1.0, 0.1, 13.6e6, 1e-300}) {
        ByteWriter w;
        w.f64(v);
        ByteReader r(w.data());
        CHECK(r.f64() == v);
    }
}

TEST_CASE("reader rejects truncated input") {
    ByteWriter w;
    w.str("hello");
    Bytes cut(w.data().begin(), w.data().end() - 1);
    ByteReader r(cut);
    CHECK_THROWS_AS(r.str(), std::runtime_error);

    ByteReader empty(Bytes{});
    CHECK_THROWS_AS(empty.u32(), std::runtime_error);
}

TEST_CASE("reader tracks remaining bytes") {
    ByteWriter w;
    w.u32(1);
    w.u8(2);
    ByteReader r(w.data());
    CHECK(r.remaining() == 5);
    r.u32();
    CHECK(r.remaining() == 1);
    CHECK_FALSE(r.done());
    r.u8();
    CHECK(r.done());
}

TEST_CASE("sha256 matches published vectors") {
    const Bytes abc{'a', 'b', 'c'};
    CHECK(to_hex(sha256(abc)) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(to_hex(sha256(Bytes{})) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("hex round-trips") {
    Bytes b{0x00, 0x0f, 0xf0, 0xff};
    CHECK(to_hex(b) == "000ff0ff");
    CHECK(from_hex("000ff0ff") == b);
    CHECK_THROWS_AS(from_hex("0g"), std::runtime_error);
    CHECK_THROWS_AS(from_hex("abc"), std::runtime_error);
}
