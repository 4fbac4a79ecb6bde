/** Node colors keyed by the server-assigned color_index. The service hands
 * out indices monotonically; we wrap them onto a fixed wheel so sibling
 * subtrees stay visually distinct without the server knowing about CSS. */

export const PALETTE: string[] = [
  "#4e79a7",
  "#f28e2b",
  "#59a14f",
  "#e15759",
  "#b07aa1",
  "#76b7b2",
  "#edc948",
  "#ff9da7",
  "#9c755f",
  "#86bcb6",
  "#d37295",
  "#8cd17d",
];

export function colorFor(index: number): string {
  const slot = ((index % PALETTE.length) + PALETTE.length) % PALETTE.length;
  return PALETTE[slot];
}
