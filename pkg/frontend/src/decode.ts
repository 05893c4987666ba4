/**
 * Strict decoder for Base-64 encoded UTF-16LE command text.
 *
 * Matches the consuming pipeline's rules exactly: the Base-64 alphabet is
 * enforced, the payload must hold a whole number of 16-bit units, and
 * unpaired surrogates are rejected rather than replaced.
 */

const BASE64_RE = /^[A-Za-z0-9+/]*={0,2}$/;

export function decodeEncodedCommand(text: string): string {
  const cleaned = text.trim();
  if (cleaned === "") {
    return "";
  }
  if (cleaned.length % 4 !== 0 || !BASE64_RE.test(cleaned)) {
    throw new Error("invalid Base-64 input");
  }
  const buf = Buffer.from(cleaned, "base64");
  if (buf.length % 2 !== 0) {
    throw new Error(`odd byte count ${buf.length} for UTF-16 payload`);
  }
  const out: string[] = [];
  for (let i = 0; i < buf.length; i += 2) {
    const unit = buf.readUInt16LE(i);
    if (unit >= 0xd800 && unit <= 0xdbff) {
      if (i + 3 >= buf.length) {
        throw new Error(`unpaired high surrogate at byte ${i}`);
      }
      const low = buf.readUInt16LE(i + 2);
      if (low < 0xdc00 || low > 0xdfff) {
        throw new Error(`unpaired high surrogate at byte ${i}`);
      }
      out.push(String.fromCharCode(unit, low));
      i += 2;
    } else if (unit >= 0xdc00 && unit <= 0xdfff) {
      throw new Error(`unpaired low surrogate at byte ${i}`);
    } else {
      out.push(String.fromCharCode(unit));
    }
  }
  return out.join("");
}

export function encodeCommand(text: string): string {
  for (let i = 0; i < text.length; i += 1) {
    const unit = text.charCodeAt(i);
    if (unit >= 0xd800 && unit <= 0xdbff) {
      const low = i + 1 < text.length ? text.charCodeAt(i + 1) : 0;
      if (low < 0xdc00 || low > 0xdfff) {
        throw new Error(`unpaired high surrogate at index ${i}`);
      }
      i += 1;
    } else if (unit >= 0xdc00 && unit <= 0xdfff) {
      throw new Error(`unpaired low surrogate at index ${i}`);
    }
  }
  return Buffer.from(text, "utf16le").toString("base64");
}
