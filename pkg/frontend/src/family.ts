/**
 * Family part of a PostScript-style font name, for CSS font-family lookup:
 * text before the first hyphen with trailing style words stripped.
 */

const STYLE_SUFFIX = /(?:bold|italic|oblique|light|black|condensed)+$/i;

export function familyName(fontId: string): string {
  const prefix = fontId.split("-", 1)[0] ?? fontId;
  const stripped = prefix.replace(STYLE_SUFFIX, "");
  return stripped.length > 0 ? stripped : prefix;
}
