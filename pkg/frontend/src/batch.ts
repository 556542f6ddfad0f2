// View model for one ten-question batch: selections, validation, submission.

import { ApiClient, Choice, TaskView } from './api.js'

export type Selection =
  | { kind: 'option'; index: number }
  | { kind: 'text'; text: string }

export type QuestionState = {
  task: TaskView
  selection: Selection | null
  submitted: boolean
  error: string | null
}

export class BatchViewModel {
  questions: QuestionState[]

  constructor(private api: ApiClient, private workerId: string, tasks: TaskView[]) {
    this.questions = tasks.map((task) => ({
      task,
      selection: null,
      submitted: false,
      error: null,
    }))
  }

  selectOption(taskId: string, index: number): void {
    const q = this.find(taskId)
    if (index < 0 || index >= q.task.options.length) throw new Error('option out of range')
    q.selection = { kind: 'option', index }
  }

  enterText(taskId: string, text: string): void {
    const q = this.find(taskId)
    if (!q.task.allows_free_text) throw new Error('task does not accept free text')
    const trimmed = text.trim()
    q.selection = trimmed ? { kind: 'text', text: trimmed } : null
  }

  /** Submit is enabled only once every question has an answer. */
  get complete(): boolean {
    return this.questions.length > 0 && this.questions.every((q) => q.selection !== null)
  }

  get allSubmitted(): boolean {
    return this.questions.every((q) => q.submitted)
  }

  /**
   * One POST per question. Questions already submitted are skipped, so a
   * retry after a partial failure never double-posts; the server's 409 on
   * a duplicate is treated as success. Failed questions keep their
   * selections and error text for the next attempt.
   */
  async submitAll(): Promise<{ submitted: number; failed: number }> {
    if (!this.complete) throw new Error('batch is incomplete')
    let submitted = 0
    let failed = 0
    for (const q of this.questions) {
      if (q.submitted) continue
      const choice: Choice =
        q.selection!.kind === 'option'
          ? { option: q.selection!.index }
          : { text: q.selection!.text }
      try {
        await this.api.submitAnswer(q.task.task_id, this.workerId, choice)
        q.submitted = true
        q.error = null
        submitted += 1
      } catch (err) {
        q.error = err instanceof Error ? err.message : String(err)
        failed += 1
      }
    }
    return { submitted, failed }
  }

  private find(taskId: string): QuestionState {
    const q = this.questions.find((q) => q.task.task_id === taskId)
    if (!q) throw new Error(`no question ${taskId} in this batch`)
    return q
  }
}
