/** Wire types for the three backend endpoints the explorer consumes. */
export {};
