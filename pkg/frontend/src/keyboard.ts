// Two-step keyboard picker: a digit 1-4 selects the category, the next
// digit selects a subtype inside it. Only labels present in the server
// schema are reachable, so the UI cannot invent a label the core would
// reject.

import type { CategoryInfo, Schema } from "./types";

export interface PickerSelection {
  category: string | null;
  subtype: string | null;
}

export class ShortcutPicker {
  private readonly categories: CategoryInfo[];
  private categoryIndex: number | null = null;
  private subtypeId: string | null = null;

  constructor(schema: Schema) {
    this.categories = schema.categories;
  }

  get selection(): PickerSelection {
    return {
      category:
        this.categoryIndex === null
          ? null
          : this.categories[this.categoryIndex].id,
      subtype: this.subtypeId,
    };
  }

  /** Feed one key; returns true when the key changed the selection.

  A digit starts a fresh category pick when nothing is mid-selection
  (including when a complete suggestion is preselected); with a category
  pending it picks the subtype.
  */
  press(key: string): boolean {
    if (!/^[0-9]$/.test(key)) {
      return false;
    }
    const digit = Number(key);
    const midSelection = this.categoryIndex !== null && this.subtypeId === null;
    if (!midSelection) {
      if (digit >= 1 && digit <= this.categories.length) {
        this.categoryIndex = digit - 1;
        this.subtypeId = null;
        return true;
      }
      return false;
    }
    const subtypes = this.categories[this.categoryIndex!].subtypes;
    if (digit >= 1 && digit <= subtypes.length) {
      this.subtypeId = subtypes[digit - 1].id;
      return true;
    }
    // A category digit restarts the two-step sequence.
    if (digit >= 1 && digit <= this.categories.length) {
      this.categoryIndex = digit - 1;
      this.subtypeId = null;
      return true;
    }
    return false;
  }

  /** Select explicitly (mouse path); validates against the schema. */
  select(categoryId: string, subtypeId: string | null): boolean {
    const index = this.categories.findIndex((c) => c.id === categoryId);
    if (index < 0) {
      return false;
    }
    if (
      subtypeId !== null &&
      !this.categories[index].subtypes.some((s) => s.id === subtypeId)
    ) {
      return false;
    }
    this.categoryIndex = index;
    this.subtypeId = subtypeId;
    return true;
  }

  get complete(): boolean {
    return this.categoryIndex !== null && this.subtypeId !== null;
  }

  clear(): void {
    this.categoryIndex = null;
    this.subtypeId = null;
  }
}
